use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::circuit::Circuit;
use crate::dense::{run_dense_until, run_dense_with_cap};
use crate::error::{Error, Result};
use crate::selector::{run_mixed_until, select_backend, BackendChoice, MixedResult};
use crate::sparse::{run_sparse, run_sparse_until};
use crate::state::{infidelity, DropConfig, SparseBackend, DENSE_CAP};

use super::{
    median, sort_points, BenchPoint, Benchmark, GridBackend, Status, DEFAULT_REPEATS, DEFAULT_TIME_CUTOFF_S,
};

/// Which nondeterministic-qubit counts a grid visits. Values above a cell's
/// maximum are skipped. Grover ignores the rule: its whole search register is
/// always nondeterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RRule {
    All,
    Fixed(usize),
    Values(Vec<usize>),
}

impl RRule {
    fn values(&self, benchmark: Benchmark, n: usize) -> Vec<usize> {
        let max = benchmark.max_nondet(n);
        if benchmark == Benchmark::Grover {
            return vec![max];
        }
        match self {
            RRule::All => (0..=max).collect(),
            RRule::Fixed(r) => (*r <= max).then_some(*r).into_iter().collect(),
            RRule::Values(rs) => rs.iter().copied().filter(|&r| r <= max).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GridConfig {
    pub benchmark: Benchmark,
    /// Total qubit counts. Sizes the benchmark cannot be built at are skipped.
    pub sizes: Vec<usize>,
    pub r_rule: RRule,
    pub backends: Vec<GridBackend>,
    pub drop: DropConfig,
    pub repeats: usize,
    pub time_cutoff_s: f64,
    pub seed: u64,
    pub dense_cap: usize,
    /// Run one cell at a time. Otherwise lanes are spread over worker threads.
    pub serial: bool,
}

impl GridConfig {
    pub fn new(benchmark: Benchmark, sizes: Vec<usize>) -> Self {
        GridConfig {
            benchmark,
            sizes,
            r_rule: RRule::All,
            backends: GridBackend::all(),
            drop: DropConfig::disabled(),
            repeats: DEFAULT_REPEATS,
            time_cutoff_s: DEFAULT_TIME_CUTOFF_S,
            seed: 0,
            dense_cap: DENSE_CAP,
            serial: true,
        }
    }
}

enum Cell {
    Ok { wall_time_s: f64, dropped_mass: Option<f64> },
    Capacity,
    Timeout { elapsed_s: f64 },
}

fn time_cell(
    circuit: &Circuit,
    backend: GridBackend,
    drop: DropConfig,
    repeats: usize,
    cutoff: Duration,
    dense_cap: usize,
) -> Result<Cell> {
    let dense = match backend {
        GridBackend::Dense => true,
        GridBackend::Mixed => select_backend(circuit) == BackendChoice::Dense,
        _ => false,
    };
    if dense && circuit.n_qubits() > dense_cap {
        return Ok(Cell::Capacity);
    }
    let mut times = Vec::with_capacity(repeats);
    let mut dropped_mass = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let deadline = Some(start + cutoff);
        let outcome = match backend {
            GridBackend::Array => {
                run_sparse_until(circuit, SparseBackend::Array, drop, deadline).map(|r| Some(r.dropped_mass))
            }
            GridBackend::Store => run_sparse_until(circuit, SparseBackend::IndexedStore, drop, deadline)
                .map(|r| Some(r.dropped_mass)),
            GridBackend::Dense => run_dense_until(circuit, dense_cap, deadline).map(|_| None),
            GridBackend::Mixed => run_mixed_until(circuit, drop, dense_cap, deadline).map(|run| match run.result {
                MixedResult::Sparse(report) => Some(report.dropped_mass),
                MixedResult::Dense(_) => None,
            }),
        };
        let elapsed = start.elapsed();
        match outcome {
            Ok(mass) => dropped_mass = mass,
            Err(Error::Timeout(_)) => return Ok(Cell::Timeout { elapsed_s: elapsed.as_secs_f64() }),
            Err(Error::Capacity(_)) => return Ok(Cell::Capacity),
            Err(e) => return Err(e),
        }
        if elapsed > cutoff {
            return Ok(Cell::Timeout { elapsed_s: elapsed.as_secs_f64() });
        }
        times.push(elapsed.as_secs_f64());
    }
    Ok(Cell::Ok { wall_time_s: median(&mut times), dropped_mass })
}

/// One backend at one `r`, visited in ascending `n` so that a time cutoff
/// can skip every larger size.
struct Lane {
    backend: GridBackend,
    r: usize,
    sizes: Vec<usize>,
}

fn run_lane(config: &GridConfig, lane: &Lane) -> Result<Vec<BenchPoint>> {
    let cutoff = Duration::from_secs_f64(config.time_cutoff_s);
    let mut points = Vec::with_capacity(lane.sizes.len());
    let mut timed_out = false;
    for &n in &lane.sizes {
        let point = |wall_time_s, status, dropped_mass| BenchPoint {
            benchmark: config.benchmark,
            total_qubits: n,
            nondet_qubits: lane.r,
            backend: lane.backend.label().to_string(),
            wall_time_s,
            status,
            error_metric: None,
            dropped_mass,
            repeats: config.repeats,
            seed: config.seed,
        };
        if timed_out {
            points.push(point(0.0, Status::TimeCutoff, None));
            continue;
        }
        let circuit = config.benchmark.circuit(n, lane.r)?;
        log::debug!("cell {} n={n} r={} {}", config.benchmark, lane.r, lane.backend);
        match time_cell(&circuit, lane.backend, config.drop, config.repeats, cutoff, config.dense_cap)? {
            Cell::Ok { wall_time_s, dropped_mass } => points.push(point(wall_time_s, Status::Ok, dropped_mass)),
            Cell::Capacity => points.push(point(0.0, Status::CapacityCutoff, None)),
            Cell::Timeout { elapsed_s } => {
                timed_out = true;
                points.push(point(elapsed_s, Status::TimeCutoff, None));
            }
        }
    }
    Ok(points)
}

/// Times every admissible `(n, r, backend)` cell of a benchmark.
///
/// Dense cells above the dense cap are reported as `CapacityCutoff` without
/// running. A cell over the time budget is reported as `TimeCutoff`, and so
/// is every larger `n` for the same backend and `r`.
pub fn run_grid(config: &GridConfig) -> Result<Vec<BenchPoint>> {
    if config.repeats == 0 {
        return Err(Error::config("repeats must be at least 1"));
    }
    if config.backends.is_empty() {
        return Err(Error::config("no backends selected"));
    }
    if config.time_cutoff_s.is_nan() || config.time_cutoff_s <= 0.0 {
        return Err(Error::config("time cutoff must be positive"));
    }
    let mut sizes: Vec<usize> =
        config.sizes.iter().copied().filter(|&n| config.benchmark.admits_total(n)).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.is_empty() {
        return Err(Error::config(format!("no admissible sizes for {}", config.benchmark)));
    }

    let mut lanes = Vec::new();
    for &backend in &config.backends {
        let mut rs: Vec<usize> = sizes.iter().flat_map(|&n| config.r_rule.values(config.benchmark, n)).collect();
        rs.sort_unstable();
        rs.dedup();
        for r in rs {
            let lane_sizes: Vec<usize> = sizes
                .iter()
                .copied()
                .filter(|&n| config.r_rule.values(config.benchmark, n).contains(&r))
                .collect();
            lanes.push(Lane { backend, r, sizes: lane_sizes });
        }
    }
    if lanes.is_empty() {
        return Err(Error::config("the r rule selects no cells"));
    }

    let mut points = if config.serial {
        let mut all = Vec::new();
        for lane in &lanes {
            all.extend(run_lane(config, lane)?);
        }
        all
    } else {
        run_lanes_parallel(config, &lanes)?
    };
    sort_points(&mut points);
    Ok(points)
}

fn run_lanes_parallel(config: &GridConfig, lanes: &[Lane]) -> Result<Vec<BenchPoint>> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(lanes.len());
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::new());
    let first_error = Mutex::new(None);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(lane) = lanes.get(i) else { break };
                match run_lane(config, lane) {
                    Ok(points) => results.lock().unwrap().extend(points),
                    Err(e) => {
                        first_error.lock().unwrap().get_or_insert(e);
                        break;
                    }
                }
            });
        }
    });
    if let Some(e) = first_error.into_inner().unwrap() {
        return Err(e);
    }
    Ok(results.into_inner().unwrap())
}

#[derive(Clone, Debug)]
pub struct DropStudyConfig {
    pub benchmark: Benchmark,
    /// Total qubits; ignored for Grover, whose size follows from `r`.
    pub n: usize,
    pub r_values: Vec<usize>,
    pub limit: usize,
    pub repeats: usize,
    pub seed: u64,
    pub backend: SparseBackend,
    pub dense_cap: usize,
}

impl DropStudyConfig {
    pub fn new(benchmark: Benchmark, n: usize, r_values: Vec<usize>) -> Self {
        DropStudyConfig {
            benchmark,
            n,
            r_values,
            limit: crate::state::DEFAULT_DROP_LIMIT,
            repeats: DEFAULT_REPEATS,
            seed: 0,
            backend: SparseBackend::IndexedStore,
            dense_cap: DENSE_CAP,
        }
    }
}

/// Label of the drop-enabled rows of a drop study.
pub(crate) fn drop_label(backend: SparseBackend) -> String {
    format!("{}-drop", backend.label())
}

/// For every `r`, one exact run and one drop-enabled run, both timed, with
/// `error_metric` the infidelity against the exact final state. The exact
/// reference is the dense simulator when `n` fits under the dense cap and the
/// drop-free sparse run otherwise.
pub fn run_drop_study(config: &DropStudyConfig) -> Result<Vec<BenchPoint>> {
    if config.r_values.is_empty() {
        return Err(Error::config("drop study needs at least one r"));
    }
    if config.repeats == 0 {
        return Err(Error::config("repeats must be at least 1"));
    }
    let approx_drop = DropConfig::with_limit(config.limit)?;
    let mut points = Vec::new();
    for &r in &config.r_values {
        let n = match config.benchmark {
            Benchmark::Grover => 3 * r + 5,
            _ => config.n,
        };
        if !config.benchmark.admits_total(n) || r > config.benchmark.max_nondet(n) {
            return Err(Error::config(format!("{} has no instance with n = {n}, r = {r}", config.benchmark)));
        }
        let circuit = config.benchmark.circuit(n, r)?;

        let (exact_time, exact) = timed(config.repeats, || run_sparse(&circuit, config.backend, DropConfig::disabled()))?;
        let (approx_time, approx) = timed(config.repeats, || run_sparse(&circuit, config.backend, approx_drop))?;

        let (exact_error, approx_error) = if n <= config.dense_cap {
            let reference = run_dense_with_cap(&circuit, config.dense_cap)?;
            (
                infidelity(&reference, &exact.final_state)?,
                infidelity(&reference, &approx.final_state)?,
            )
        } else {
            (0.0, infidelity(&exact.final_state, &approx.final_state)?)
        };

        let point = |backend: String, wall_time_s, error, dropped| BenchPoint {
            benchmark: config.benchmark,
            total_qubits: n,
            nondet_qubits: r,
            backend,
            wall_time_s,
            status: Status::Ok,
            error_metric: Some(error),
            dropped_mass: Some(dropped),
            repeats: config.repeats,
            seed: config.seed,
        };
        points.push(point(config.backend.label().to_string(), exact_time, exact_error, exact.dropped_mass));
        points.push(point(drop_label(config.backend), approx_time, approx_error, approx.dropped_mass));
    }
    sort_points(&mut points);
    Ok(points)
}

/// Runs `f` `repeats` times; returns the median wall time and the last result.
fn timed<T>(repeats: usize, mut f: impl FnMut() -> Result<T>) -> Result<(f64, T)> {
    let mut times = Vec::with_capacity(repeats);
    let mut last = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let value = f()?;
        times.push(start.elapsed().as_secs_f64());
        last = Some(value);
    }
    Ok((median(&mut times), last.expect("repeats >= 1")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(benchmark: Benchmark, sizes: Vec<usize>) -> GridConfig {
        GridConfig { repeats: 1, backends: vec![GridBackend::Array, GridBackend::Dense], ..GridConfig::new(benchmark, sizes) }
    }

    #[test]
    fn superposition_grid_is_upper_triangular() {
        let points = run_grid(&quick(Benchmark::Superposition, (2..=5).collect())).unwrap();
        let cells: usize = (2..=5).map(|n| n + 1).sum();
        assert_eq!(points.len(), 2 * cells);
        assert!(points.iter().all(|p| p.nondet_qubits <= p.total_qubits && p.status == Status::Ok));
    }

    #[test]
    fn dense_over_cap_is_capacity_cutoff() {
        let config = GridConfig { dense_cap: 6, r_rule: RRule::Fixed(1), ..quick(Benchmark::Superposition, vec![6, 7]) };
        let points = run_grid(&config).unwrap();
        let dense: Vec<_> = points.iter().filter(|p| p.backend == "dense").collect();
        assert_eq!(dense[0].status, Status::Ok);
        assert_eq!(dense[1].status, Status::CapacityCutoff);
        assert!(points.iter().filter(|p| p.backend == "array").all(|p| p.status == Status::Ok));
    }

    #[test]
    fn time_cutoff_skips_larger_sizes() {
        let config = GridConfig {
            time_cutoff_s: 1e-9,
            r_rule: RRule::Fixed(2),
            ..quick(Benchmark::Superposition, vec![4, 5, 6])
        };
        let points = run_grid(&config).unwrap();
        assert!(points.iter().all(|p| p.status == Status::TimeCutoff));
    }

    #[test]
    fn addition_and_grover_grids() {
        let points = run_grid(&quick(Benchmark::Addition, (8..=12).collect())).unwrap();
        // n = 8 (k = 1, r <= 2) and n = 11 (k = 2, r <= 4)
        assert_eq!(points.len(), 2 * (3 + 5));
        let points = run_grid(&quick(Benchmark::Grover, vec![8, 11, 14])).unwrap();
        let rs: Vec<usize> = points.iter().filter(|p| p.backend == "array").map(|p| p.nondet_qubits).collect();
        assert_eq!(rs, vec![1, 2, 3]);
    }

    #[test]
    fn parallel_matches_serial_structure() {
        let serial = run_grid(&quick(Benchmark::Superposition, vec![3, 4])).unwrap();
        let parallel = run_grid(&GridConfig { serial: false, ..quick(Benchmark::Superposition, vec![3, 4]) }).unwrap();
        let shape = |ps: &[BenchPoint]| {
            ps.iter().map(|p| (p.total_qubits, p.nondet_qubits, p.backend.clone(), p.status)).collect::<Vec<_>>()
        };
        assert_eq!(shape(&serial), shape(&parallel));
    }

    #[test]
    fn invalid_grids() {
        assert!(run_grid(&GridConfig { repeats: 0, ..quick(Benchmark::Superposition, vec![3]) }).is_err());
        assert!(run_grid(&quick(Benchmark::Addition, vec![9, 10])).is_err());
        assert!(run_grid(&GridConfig { backends: vec![], ..quick(Benchmark::Superposition, vec![3]) }).is_err());
    }

    #[test]
    fn drop_study_uniform_truncation() {
        let config = DropStudyConfig {
            repeats: 1,
            backend: SparseBackend::Array,
            ..DropStudyConfig::new(Benchmark::Superposition, 14, vec![9, 11])
        };
        let points = run_drop_study(&config).unwrap();
        assert_eq!(points.len(), 4);
        let find = |r, label: &str| points.iter().find(|p| p.nondet_qubits == r && p.backend == label).unwrap();
        assert!(find(9, "array").error_metric.unwrap() < 1e-12);
        assert!(find(9, "array-drop").error_metric.unwrap() < 1e-12);
        let e = find(11, "array-drop").error_metric.unwrap();
        assert!((e - (1.0 - 1000.0 / 2048.0)).abs() < 1e-9, "{e}");
        assert!((find(11, "array-drop").dropped_mass.unwrap() - 1048.0 / 2048.0).abs() < 1e-12);
    }

    #[test]
    fn drop_study_addition_has_large_error() {
        // 26 qubits (k = 7) with 11 nondeterministic inputs; sparse reference.
        let config = DropStudyConfig {
            repeats: 1,
            backend: SparseBackend::Array,
            dense_cap: 20,
            ..DropStudyConfig::new(Benchmark::Addition, 26, vec![11])
        };
        let points = run_drop_study(&config).unwrap();
        let approx = points.iter().find(|p| p.backend == "array-drop").unwrap();
        assert!(approx.error_metric.unwrap() > 0.3, "{:?}", approx.error_metric);
        let exact = points.iter().find(|p| p.backend == "array").unwrap();
        assert_eq!(exact.error_metric, Some(0.0));
    }

    #[test]
    fn drop_study_rejects_bad_configs() {
        let mut config = DropStudyConfig::new(Benchmark::Superposition, 10, vec![]);
        assert!(run_drop_study(&config).is_err());
        config.r_values = vec![11];
        assert!(run_drop_study(&config).is_err());
        config.r_values = vec![2];
        config.limit = 0;
        assert!(run_drop_study(&config).is_err());
    }
}
