//! The five batch experiments. Each trial draws from its own rng stream and
//! results are collected in trial order, so output never depends on `jobs`.

use std::collections::BTreeMap;

use fsr_core::editing::{cut, det_g_check, gkt_check, kt_sequential_edit, sequential_edit, BitSeq};
use fsr_core::oracle::{self, ExactReport, Rational};
use fsr_core::pd::{self, FinitePermDist};
use fsr_core::toggling::{self, RegionParams, Unhappy};
use fsr_core::{rng, Edge, FeedbackLogic, Perm, Segment, Vertex};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ConfigError, Defaults, Experiment, ExperimentConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Must hold on every trial; a failure is a bug.
    Exact,
    /// A finite-size tolerance around a limit value.
    Calibrated,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub value: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, kind: CheckKind, value: f64, lo: Option<f64>, hi: Option<f64>) -> Self {
        let pass = lo.is_none_or(|l| value >= l) && hi.is_none_or(|h| value <= h);
        Check { name: name.to_string(), kind, value, lo, hi, pass }
    }

    fn zero(name: &str, failures: usize) -> Self {
        Self::new(name, CheckKind::Exact, failures as f64, Some(0.0), Some(0.0))
    }

    fn band(name: &str, value: f64, center: f64, tol: f64) -> Self {
        Self::new(name, CheckKind::Calibrated, value, Some(center - tol), Some(center + tol))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub experiment: Experiment,
    pub version: &'static str,
    pub core_version: &'static str,
    pub defaults_version: u32,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub metrics: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
}

impl Summary {
    fn new(config: &ExperimentConfig, defaults: &Defaults) -> Self {
        Summary {
            experiment: config.experiment,
            version: env!("CARGO_PKG_VERSION"),
            core_version: fsr_core::VERSION,
            defaults_version: defaults.version,
            config: config.clone(),
            seed: config.seed,
            metrics: BTreeMap::new(),
            checks: Vec::new(),
        }
    }

    fn metric(&mut self, key: &str, value: impl Into<Value>) {
        self.metrics.insert(key.to_string(), value.into());
    }

    /// Failed exact checks, plus failed calibrated ones when `strict`.
    pub fn violations(&self, strict: bool) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass && (strict || c.kind == CheckKind::Exact)).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap() + "\n"
    }
}

pub struct Outcome<R> {
    pub summary: Summary,
    pub records: Vec<R>,
}

/// `f(trial)` for every trial on a pool of `jobs` threads, in trial order.
pub fn run_trials<T: Send>(jobs: usize, trials: usize, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool");
    pool.install(|| (0..trials as u64).into_par_iter().map(f).collect())
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if c == 0 {
        f64::NAN
    } else {
        s / c as f64
    }
}

fn random_starts<R: Rng + ?Sized>(n: u32, k: usize, r: &mut R) -> Vec<Edge> {
    (0..k).map(|_| Edge(r.random_range(0..1u64 << n))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PdRecord {
    pub trial: u64,
    pub cycles: usize,
    pub a1_over_n: f64,
    pub l1_over_n: f64,
    pub l2_over_n: f64,
    /// `d(L/N, X)` for an independent PD draw `X`.
    pub d_sorted_vs_pd: f64,
    /// `d(X, X')` for two independent PD draws, the baseline for the column above.
    pub d_pd_vs_pd: f64,
}

pub fn run_pd_experiment(config: &ExperimentConfig, defaults: &Defaults) -> Result<Outcome<PdRecord>, ConfigError> {
    config.validate()?;
    let d = &defaults.pd;
    let n = config.n;
    let tol = d.gem_tol;
    let records = run_trials(config.jobs, config.trials, |trial| {
        let mut r = rng::stream(config.seed, trial);
        let f = FeedbackLogic::random(n, &mut r).expect("validated width");
        let dec = f.decompose().expect("validated width");
        let age = dec.age_ordered(&mut r);
        let sorted = dec.scaled();
        let x = pd::pd_sample(&mut r, tol).expect("tolerance");
        let y = pd::pd_sample(&mut r, tol).expect("tolerance");
        let big_n = (1u64 << n) as f64;
        PdRecord {
            trial,
            cycles: dec.lengths.len(),
            a1_over_n: age.lengths[0] as f64 / big_n,
            l1_over_n: sorted[0],
            l2_over_n: sorted.get(1).copied().unwrap_or(0.0),
            d_sorted_vs_pd: pd::metric_d(&sorted, &x.coords),
            d_pd_vs_pd: pd::metric_d(&x.coords, &y.coords),
        }
    });
    let mut s = Summary::new(config, defaults);
    let a1: Vec<f64> = records.iter().map(|r| r.a1_over_n).collect();
    let mean_a1 = mean(a1.iter().copied());
    let ks = pd::ks_statistic(&a1, |x| x.clamp(0.0, 1.0)).expect("nonempty");
    let mean_l1 = mean(records.iter().map(|r| r.l1_over_n));
    let p_half = records.iter().filter(|r| r.l1_over_n <= 0.5).count() as f64 / records.len() as f64;
    let ref_l1 = pd::largest_coordinate_mean();
    let ref_half = pd::dickman_rho(2.0).expect("finite");
    s.metric("mean_a1_over_n", mean_a1);
    s.metric("ks_a1_vs_uniform", ks);
    s.metric("mean_l1_over_n", mean_l1);
    s.metric("p_l1_le_half", p_half);
    s.metric("mean_cycles", mean(records.iter().map(|r| r.cycles as f64)));
    s.metric("mean_d_sorted_vs_pd", mean(records.iter().map(|r| r.d_sorted_vs_pd)));
    s.metric("mean_d_pd_vs_pd", mean(records.iter().map(|r| r.d_pd_vs_pd)));
    s.metric("reference_mean_l1", ref_l1);
    s.metric("reference_p_l1_le_half", ref_half);
    s.checks.push(Check::band("mean_a1_over_n", mean_a1, d.mean_a1_center, d.mean_a1_tol));
    s.checks.push(Check::new("ks_a1_vs_uniform", CheckKind::Calibrated, ks, None, Some(d.ks_a1_max)));
    s.checks.push(Check::band("mean_l1_over_n", mean_l1, ref_l1, d.mean_l1_tol));
    s.checks.push(Check::band("p_l1_le_half", p_half, ref_half, d.p_l1_half_tol));
    Ok(Outcome { summary: s, records })
}

#[derive(Clone, Debug, Serialize)]
pub struct SameCycleRecord {
    pub trial: u64,
    pub cocyclic: bool,
    /// All starts distinct; only these enter the law of σ.
    pub distinct: bool,
    /// The relativized permutation in cycle notation.
    pub sigma: String,
}

pub fn run_same_cycle(config: &ExperimentConfig, defaults: &Defaults) -> Result<Outcome<SameCycleRecord>, ConfigError> {
    config.validate()?;
    let (n, k) = (config.n, config.k);
    let rows = run_trials(config.jobs, config.trials, |trial| {
        let mut r = rng::stream(config.seed, trial);
        let f = FeedbackLogic::random(n, &mut r).expect("validated width");
        let starts = random_starts(n, k, &mut r);
        let sigma = f.relativize(&starts).expect("valid starts");
        let distinct = sigma.len() == k;
        (SameCycleRecord { trial, cocyclic: sigma.is_unicyclic(), distinct, sigma: sigma.to_string() }, sigma)
    });
    let mut s = Summary::new(config, defaults);
    let p = rows.iter().filter(|(r, _)| r.cocyclic).count() as f64 / rows.len() as f64;
    let full: Vec<&Perm> = rows.iter().filter(|(r, _)| r.distinct).map(|(_, p)| p).collect();
    s.metric("p_cocyclic", p);
    s.metric("target_p_cocyclic", 1.0 / k as f64);
    s.metric("distinct_trials", full.len());
    let tv = (!full.is_empty()).then(|| pd::tv_distance(&FinitePermDist::empirical(k, full).expect("k validated")));
    s.metric("tv_sigma_vs_uniform", tv);
    let key = k.to_string();
    if let Some(&tol) = defaults.same_cycle.p_tol.get(&key) {
        s.checks.push(Check::band("p_cocyclic", p, 1.0 / k as f64, tol));
    }
    if let (Some(&max), Some(tv)) = (defaults.same_cycle.tv_max.get(&key), tv) {
        s.checks.push(Check::new("tv_sigma_vs_uniform", CheckKind::Calibrated, tv, None, Some(max)));
    }
    Ok(Outcome { summary: s, records: rows.into_iter().map(|(r, _)| r).collect() })
}

#[derive(Clone, Debug, Serialize)]
pub struct EditRecord {
    pub trial: u64,
    pub g: bool,
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
    pub e: bool,
    pub f: bool,
    /// Sequential = shotgun and repeats kept; only on `G`.
    pub det_g_ok: Option<bool>,
    pub gkt: bool,
    /// Cut single edit = suspended edit; only on `Gkt`.
    pub cut_agree: Option<bool>,
}

/// Sequential edit of all `k(n+t)` coins, cut into `k` walks.
pub fn cut_single_edit(coins: &BitSeq, n: usize, k: usize, t: usize) -> Vec<Segment> {
    let out = sequential_edit(coins, n).expect("validated width").output;
    let single = Segment::from_bits(n as u32, out.as_slice()).expect("width");
    cut(&single, k, t).expect("length k(n+t)")
}

pub fn run_edit_verify(config: &ExperimentConfig, defaults: &Defaults) -> Result<Outcome<EditRecord>, ConfigError> {
    config.validate()?;
    let (n, k, t) = (config.n as usize, config.k, config.t);
    let records = run_trials(config.jobs, config.trials, |trial| {
        let mut r = rng::stream(config.seed, trial);
        let coins = BitSeq::random(n + t, &mut r);
        let det = det_g_check(&coins, n).expect("validated width");
        let g = det.report;
        let kt_coins = BitSeq::random(k * (n + t), &mut r);
        let gkt = gkt_check(&kt_coins, n, k, t).expect("length k(n+t)");
        let cut_agree = gkt.then(|| {
            let kt = kt_sequential_edit(&kt_coins, n, k, t).expect("length k(n+t)");
            kt.segments == cut_single_edit(&kt_coins, n, k, t)
        });
        EditRecord {
            trial,
            g: g.overall,
            a: g.a,
            b: g.b,
            c: g.c,
            d: g.d,
            e: g.e,
            f: g.f,
            det_g_ok: g.overall.then(|| det.holds()),
            gkt,
            cut_agree,
        }
    });
    let mut s = Summary::new(config, defaults);
    let trials = records.len() as f64;
    let g_count = records.iter().filter(|r| r.g).count();
    let gkt_count = records.iter().filter(|r| r.gkt).count();
    let det_fail = records.iter().filter(|r| r.det_g_ok == Some(false)).count();
    let cut_fail = records.iter().filter(|r| r.cut_agree == Some(false)).count();
    let g_freq = g_count as f64 / trials;
    s.metric("g_count", g_count);
    s.metric("g_frequency", g_freq);
    s.metric("gkt_count", gkt_count);
    s.metric("gkt_frequency", gkt_count as f64 / trials);
    s.metric("det_g_failures", det_fail);
    s.metric("cut_failures", cut_fail);
    s.metric("t3n_over_n2", (t as f64).powi(3) * n as f64 / 4f64.powi(n as i32));
    s.checks.push(Check::zero("det_g_failures", det_fail));
    s.checks.push(Check::zero("cut_failures", cut_fail));
    s.checks.push(Check::new("g_frequency", CheckKind::Calibrated, g_freq, Some(defaults.edit_verify.g_freq_min), None));
    Ok(Outcome { summary: s, records })
}

#[derive(Clone, Debug, Serialize)]
pub struct ToggleRecord {
    pub trial: u64,
    pub happy: bool,
    pub unhappy_reason: Option<String>,
    /// `relativize(f*) = ĝ∘g` for all cousins; only when happy.
    pub matching_ok: Option<bool>,
    /// Change in cycle count after toggling one random vertex of `f`.
    pub crossjoin_delta: i64,
    /// Color pairs as `a-b`, joined by `;`.
    pub schedule: Option<String>,
    pub schedule_distance: Option<f64>,
}

fn reason(u: Unhappy) -> String {
    match u {
        Unhappy::RepeatedEdge => "repeated_edge".into(),
        Unhappy::NullChoice(l) => format!("null_choice_{l}"),
        Unhappy::RepeatedChoice => "repeated_choice".into(),
        Unhappy::Unstable => "unstable".into(),
    }
}

pub fn toggle_params(config: &ExperimentConfig, defaults: &Defaults) -> Result<RegionParams, ConfigError> {
    let p = match &config.regions {
        Some(regions) => RegionParams::with_overrides(config.n, config.t, regions),
        None => RegionParams::desk(config.n, config.t, config.m, config.k, defaults.toggle_verify.region_target),
    };
    p.map_err(|e| ConfigError::Invalid(e.to_string()))
}

pub fn run_toggle_verify(config: &ExperimentConfig, defaults: &Defaults) -> Result<Outcome<ToggleRecord>, ConfigError> {
    config.validate()?;
    let params = toggle_params(config, defaults)?;
    let (n, k) = (config.n, config.k);
    let records = run_trials(config.jobs, config.trials, |trial| {
        let mut r = rng::stream(config.seed, trial);
        let f = FeedbackLogic::random(n, &mut r).expect("validated width");
        let starts = random_starts(n, k, &mut r);
        let v = Vertex(r.random_range(0..1u64 << (n - 1)));
        let before = f.cycle_count().expect("validated width") as i64;
        let after = f.toggled(&[v]).expect("vertex in range").cycle_count().expect("validated width") as i64;
        let mut rec = ToggleRecord {
            trial,
            happy: false,
            unhappy_reason: None,
            matching_ok: None,
            crossjoin_delta: after - before,
            schedule: None,
            schedule_distance: None,
        };
        match toggling::happy_check(&f, &starts, &params).expect("validated params") {
            Ok(class) => {
                rec.happy = true;
                rec.matching_ok = Some(toggling::verify_matching_claim(&class).expect("class is consistent"));
                let words: Vec<String> = class.schedule.iter().map(|(a, b)| format!("{a}-{b}")).collect();
                rec.schedule = Some(words.join(";"));
                rec.schedule_distance = pd::schedule_distance(k, &class.schedule).ok().map(|d| d.value);
            }
            Err(u) => rec.unhappy_reason = Some(reason(u)),
        }
        rec
    });
    let mut s = Summary::new(config, defaults);
    let happy = records.iter().filter(|r| r.happy).count();
    let matching_fail = records.iter().filter(|r| r.matching_ok == Some(false)).count();
    let cross_fail = records.iter().filter(|r| r.crossjoin_delta.abs() != 1).count();
    s.metric("happy_count", happy);
    s.metric("happy_rate", happy as f64 / records.len() as f64);
    s.metric("matching_failures", matching_fail);
    s.metric("crossjoin_failures", cross_fail);
    let dists: Vec<f64> = records.iter().filter_map(|r| r.schedule_distance).collect();
    s.metric("mean_schedule_distance", (!dists.is_empty()).then(|| mean(dists.iter().copied())));
    s.metric("regions", serde_json::to_value(&params.regions).unwrap());
    s.metric("region_warnings", serde_json::to_value(toggling::validate_region_params(&params)).unwrap());
    s.checks.push(Check::zero("matching_failures", matching_fail));
    s.checks.push(Check::zero("crossjoin_failures", cross_fail));
    Ok(Outcome { summary: s, records })
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleRecord {
    pub report: String,
    pub n: u32,
    pub k: Option<usize>,
    pub t: Option<usize>,
    pub identity: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

fn frac(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// All exhaustive reports named in the defaults. `inject_fault` perturbs one
/// identity so the failure path can be exercised end to end.
pub fn run_oracle(
    config: &ExperimentConfig,
    defaults: &Defaults,
    inject_fault: bool,
) -> Result<Outcome<OracleRecord>, ConfigError> {
    config.validate()?;
    let o = &defaults.oracle;
    let invalid = |e: oracle::OracleError| ConfigError::Invalid(e.to_string());
    let mut reports: Vec<ExactReport> = Vec::new();
    for &n in &o.cycle_n {
        reports.push(oracle::exact_cycle_statistics(n).map_err(invalid)?);
    }
    for &(n, k) in &o.moment {
        reports.push(oracle::exact_moment_identity(n, k).map_err(invalid)?);
    }
    for &(n, t) in &o.honest {
        reports.push(oracle::exact_honest_t_report(n, t).map_err(invalid)?);
    }
    for &(n, k, t) in &o.kt {
        reports.push(oracle::exact_kt_distribution(n, k, t).map_err(invalid)?);
    }
    for &(n, k) in &o.relativized {
        reports.push(oracle::exact_relativized_distribution(n, k).map_err(invalid)?);
    }
    if inject_fault {
        if let Some(id) = reports.iter_mut().flat_map(|r| r.identities.iter_mut()).next() {
            id.rhs += Rational::new(1, 1 << 40);
        }
    }
    let records: Vec<OracleRecord> = reports
        .iter()
        .flat_map(|r| {
            r.identities.iter().map(|id| OracleRecord {
                report: r.name.clone(),
                n: r.n,
                k: r.k,
                t: r.t,
                identity: id.name.clone(),
                lhs: frac(&id.lhs),
                rhs: frac(&id.rhs),
                holds: id.holds(),
            })
        })
        .collect();
    let mut s = Summary::new(config, defaults);
    let failures = records.iter().filter(|r| !r.holds).count();
    s.metric("identities", records.len());
    s.metric("failures", failures);
    s.metric("reports", serde_json::to_value(&reports).unwrap());
    s.checks.push(Check::zero("identity_failures", failures));
    Ok(Outcome { summary: s, records })
}

/// `{"u":…,"rho":…}`.
pub fn dickman_json(u: f64) -> Result<Value, ConfigError> {
    let rho = pd::dickman_rho(u).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(json!({ "u": u, "rho": rho }))
}

/// Exact TV distance of a schedule's random product from uniform.
pub fn schedule_json(k: usize, word: &str) -> Result<Value, ConfigError> {
    let invalid = |e: pd::PdError| ConfigError::Invalid(e.to_string());
    let schedule = pd::parse_schedule(word).map_err(invalid)?;
    let d = pd::schedule_distance(k, &schedule).map_err(invalid)?;
    Ok(json!({
        "k": k,
        "word": schedule,
        "distance": { "num": d.exact.numer(), "den": d.exact.denom() },
        "value": d.value,
    }))
}
