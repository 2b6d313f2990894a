//! Python bindings: channels, rate functions, designs and the Monte Carlo
//! engine. Core errors surface as `ValueError`.

use energy_simo::channel::{log_mgf_energy, sigma_from_snr, u_second_moment};
use energy_simo::decode::AssumedStats;
use energy_simo::design::{
    ask_constellation, design_exact, design_moments, design_robust, equalized_regions, min_distance_constellation, pam_constellation,
};
use energy_simo::montecarlo::{histogram as mc_histogram, min_antennas as mc_min_antennas, simulate as mc_simulate};
use energy_simo::rates::{chernoff_ser_bound as bound, error_exponent as exponent, level_exponents as exponents};
use energy_simo::{
    ChannelSpec, Constellation as CoreConstellation, DesignConfig, DesignOutcome as CoreOutcome, MinAntennas, RateOracle as CoreOracle,
    RobustOutcome, Scheme, Side, SimReport as CoreReport, SimScenario, UncertaintyBox,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: energy_simo::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn side(name: &str) -> PyResult<Side> {
    match name {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        other => Err(PyValueError::new_err(format!("side must be 'left' or 'right', got {other:?}"))),
    }
}

/// Fading law of the channel coefficients.
#[pyclass(name = "Channel", module = "energy_simo", frozen)]
#[derive(Clone, Copy)]
struct Channel(ChannelSpec);

#[pymethods]
impl Channel {
    #[staticmethod]
    fn rician(k_db: f64) -> PyResult<Self> {
        ChannelSpec::rician(k_db).map(Channel).map_err(err)
    }

    #[staticmethod]
    fn rayleigh() -> Self {
        Channel(ChannelSpec::rayleigh())
    }

    #[staticmethod]
    fn nakagami(m: f64) -> PyResult<Self> {
        ChannelSpec::nakagami(m).map(Channel).map_err(err)
    }

    /// Nakagami channel whose mean matches a Rician channel of the given K.
    #[staticmethod]
    fn nakagami_matched(k_db: f64) -> PyResult<Self> {
        ChannelSpec::nakagami_matched(k_db).map(Channel).map_err(err)
    }

    #[staticmethod]
    fn moments_only(alpha1: f64) -> PyResult<Self> {
        ChannelSpec::moments_only(alpha1).map(Channel).map_err(err)
    }

    #[getter]
    fn alpha1(&self) -> f64 {
        self.0.alpha1()
    }

    /// Mean of the coefficient as `(re, im)`.
    #[getter]
    fn mean(&self) -> PyResult<(f64, f64)> {
        self.0.mean().map(|m| (m.re, m.im)).map_err(err)
    }

    #[getter]
    fn scatter_variance(&self) -> PyResult<f64> {
        self.0.scatter_variance().map_err(err)
    }

    fn energy_variance(&self, sigma2: f64, p: f64) -> PyResult<f64> {
        u_second_moment(&self.0, sigma2, p).map_err(err)
    }

    fn log_mgf(&self, sigma2: f64, p: f64, theta: f64) -> PyResult<f64> {
        log_mgf_energy(&self.0, sigma2, p, theta).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

/// Noise power for an SNR in dB with unit average channel gain.
#[pyfunction]
fn noise_power(gamma_db: f64) -> PyResult<f64> {
    sigma_from_snr(gamma_db).map_err(err)
}

/// Left and right rate functions of one power level.
#[pyclass(name = "RateOracle", module = "energy_simo", frozen)]
struct RateOracle(CoreOracle);

#[pymethods]
impl RateOracle {
    #[new]
    fn new(channel: &Channel, sigma2: f64, p: f64) -> PyResult<Self> {
        CoreOracle::new(channel.0, sigma2, p).map(RateOracle).map_err(err)
    }

    fn rate_right(&self, d: f64) -> PyResult<f64> {
        self.0.rate_right(d).map_err(err)
    }

    fn rate_left(&self, d: f64) -> PyResult<f64> {
        self.0.rate_left(d).map_err(err)
    }

    /// Deviation at which the `side` rate function reaches `t`.
    fn inverse_rate(&self, side_name: &str, t: f64) -> PyResult<f64> {
        self.0.inverse_rate(side(side_name)?, t).map_err(err)
    }

    #[getter]
    fn mean_energy(&self) -> f64 {
        self.0.mean_energy()
    }

    #[getter]
    fn variance(&self) -> f64 {
        self.0.variance()
    }

    #[getter]
    fn theta_max(&self) -> f64 {
        self.0.theta_max()
    }
}

/// Power levels with optional energy-statistic decoding boundaries.
#[pyclass(name = "Constellation", module = "energy_simo", frozen)]
#[derive(Clone)]
struct Constellation(CoreConstellation);

#[pymethods]
impl Constellation {
    #[new]
    #[pyo3(signature = (levels, sigma2, boundaries=None))]
    fn new(levels: Vec<f64>, sigma2: f64, boundaries: Option<Vec<f64>>) -> PyResult<Self> {
        match boundaries {
            Some(b) => CoreConstellation::new(levels, sigma2, b),
            None => CoreConstellation::levels_only(levels, sigma2),
        }
        .map(Constellation)
        .map_err(err)
    }

    #[getter]
    fn levels(&self) -> Vec<f64> {
        self.0.levels().to_vec()
    }

    #[getter]
    fn boundaries(&self) -> Option<Vec<f64>> {
        self.0.boundaries().ok().map(<[f64]>::to_vec)
    }

    #[getter]
    fn sigma2_design(&self) -> f64 {
        self.0.sigma2_design()
    }

    #[getter]
    fn mean_power(&self) -> f64 {
        self.0.mean_power()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Constellation(levels={:?}, boundaries={:?})", self.0.levels(), self.0.boundaries().ok())
    }
}

#[pyclass(name = "DesignOutcome", module = "energy_simo", frozen)]
struct DesignOutcome(CoreOutcome);

#[pymethods]
impl DesignOutcome {
    #[getter]
    fn constellation(&self) -> Constellation {
        Constellation(self.0.constellation.clone())
    }

    #[getter]
    fn t_star(&self) -> f64 {
        self.0.t_star
    }

    /// `(right exponent of level k, left exponent of level k+1)` per boundary.
    #[getter]
    fn boundary_exponents(&self) -> Vec<(f64, f64)> {
        self.0.boundary_exponents.clone()
    }

    #[getter]
    fn mean_power(&self) -> f64 {
        self.0.mean_power
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.0.iterations
    }
}

fn config(levels: usize, budget: f64, epsilon: f64) -> DesignConfig {
    DesignConfig::new(levels).with_budget(budget).with_epsilon(epsilon)
}

#[pyfunction(name = "design_exact")]
#[pyo3(signature = (channel, sigma2, levels, budget=1.0, epsilon=1e-9))]
fn py_design_exact(py: Python<'_>, channel: &Channel, sigma2: f64, levels: usize, budget: f64, epsilon: f64) -> PyResult<DesignOutcome> {
    let ch = channel.0;
    py.allow_threads(|| design_exact(&ch, sigma2, &config(levels, budget, epsilon)))
        .map(DesignOutcome)
        .map_err(err)
}

#[pyfunction(name = "design_moments")]
#[pyo3(signature = (alpha1, sigma2, levels, budget=1.0, epsilon=1e-9))]
fn py_design_moments(alpha1: f64, sigma2: f64, levels: usize, budget: f64, epsilon: f64) -> PyResult<DesignOutcome> {
    design_moments(alpha1, sigma2, &config(levels, budget, epsilon)).map(DesignOutcome).map_err(err)
}

/// Robust design over `alpha1 in [alpha_min, alpha_max]` and noise power in
/// `[sigma2_min, sigma2_max]`; `None` when infeasible.
#[pyfunction(name = "design_robust")]
#[pyo3(signature = (alpha_min, alpha_max, sigma2_min, sigma2_max, levels, budget=1.0, epsilon=1e-9))]
fn py_design_robust(
    alpha_min: f64,
    alpha_max: f64,
    sigma2_min: f64,
    sigma2_max: f64,
    levels: usize,
    budget: f64,
    epsilon: f64,
) -> PyResult<Option<DesignOutcome>> {
    let b = UncertaintyBox::from_noise_powers(alpha_min, alpha_max, sigma2_min, sigma2_max).map_err(err)?;
    match design_robust(&b, &config(levels, budget, epsilon)).map_err(err)? {
        RobustOutcome::Designed(o) => Ok(Some(DesignOutcome(o))),
        RobustOutcome::Infeasible { .. } => Ok(None),
    }
}

/// `(alpha_min, alpha_max, sigma2_min, sigma2_max)` enclosing Rician
/// channels within `a_db` of the nominal K and SNR.
#[pyfunction]
fn rician_box(k_db: f64, gamma_db: f64, a_db: f64) -> PyResult<(f64, f64, f64, f64)> {
    let b = UncertaintyBox::from_rician_db(k_db, gamma_db, a_db).map_err(err)?;
    Ok((b.alpha_min, b.alpha_max, b.sigma2_min(), b.sigma2_max()))
}

#[pyfunction]
fn min_distance(levels: usize, sigma2: f64) -> PyResult<Constellation> {
    min_distance_constellation(levels, sigma2).map(Constellation).map_err(err)
}

#[pyfunction]
fn ask(levels: usize, sigma2: f64) -> PyResult<Constellation> {
    ask_constellation(levels, sigma2).map(Constellation).map_err(err)
}

/// Levels with boundaries balancing adjacent exponents on `channel`.
#[pyfunction]
fn with_equalized_regions(levels: Vec<f64>, channel: &Channel, sigma2: f64) -> PyResult<Constellation> {
    equalized_regions(&levels, &channel.0, sigma2).map(Constellation).map_err(err)
}

#[pyfunction]
fn pam_amplitudes(levels: usize) -> PyResult<Vec<f64>> {
    pam_constellation(levels).map(|p| p.amplitudes().to_vec()).map_err(err)
}

#[pyfunction]
fn chernoff_ser_bound(constellation: &Constellation, channel: &Channel, sigma2: f64, n: usize) -> PyResult<f64> {
    bound(&constellation.0, &channel.0, sigma2, n).map_err(err)
}

#[pyfunction]
fn error_exponent(constellation: &Constellation, channel: &Channel, sigma2: f64) -> PyResult<f64> {
    exponent(&constellation.0, &channel.0, sigma2).map_err(err)
}

/// Per-level `(left, right)` exponents.
#[pyfunction]
fn level_exponents(constellation: &Constellation, channel: &Channel, sigma2: f64) -> PyResult<Vec<(f64, f64)>> {
    exponents(&constellation.0, &channel.0, sigma2).map_err(err)
}

#[pyclass(name = "SimReport", module = "energy_simo", frozen, get_all)]
struct SimReport {
    symbols: u64,
    symbol_errors: u64,
    bits: u64,
    bit_errors: u64,
    ser: f64,
    ber: f64,
    ser_ci: (f64, f64),
    ber_ci: (f64, f64),
    sent: Vec<u64>,
    seed: u64,
    shards: usize,
    wall_time_secs: f64,
}

impl From<CoreReport> for SimReport {
    fn from(r: CoreReport) -> Self {
        SimReport {
            symbols: r.symbols,
            symbol_errors: r.symbol_errors,
            bits: r.bits,
            bit_errors: r.bit_errors,
            ser: r.ser,
            ber: r.ber,
            ser_ci: r.ser_ci,
            ber_ci: r.ber_ci,
            sent: r.sent,
            seed: r.seed,
            shards: r.shards,
            wall_time_secs: r.wall_time_secs,
        }
    }
}

#[pymethods]
impl SimReport {
    fn __repr__(&self) -> String {
        format!(
            "SimReport(symbols={}, ser={:.4e}, ber={:.4e}, seed={}, shards={})",
            self.symbols, self.ser, self.ber, self.seed, self.shards
        )
    }
}

/// Scenario from keyword arguments shared by `simulate` and `min_antennas`.
#[allow(clippy::too_many_arguments)]
fn scenario(
    scheme: &str,
    constellation: Option<&Constellation>,
    channel: &Channel,
    sigma2: f64,
    n: usize,
    symbols: u64,
    seed: u64,
    shards: usize,
    assumed: Option<(&Channel, f64)>,
    pam_levels: usize,
    block_len: usize,
    pilots: usize,
    min_bit_errors: Option<u64>,
) -> PyResult<SimScenario> {
    let (a_ch, a_s2) = assumed.map_or((channel.0, sigma2), |(c, s)| (c.0, s));
    let stats = || AssumedStats::of_channel(&a_ch, a_s2).map_err(err);
    let need = || constellation.map(|c| c.0.clone()).ok_or_else(|| PyValueError::new_err(format!("scheme {scheme:?} needs a constellation")));
    let scheme = match scheme {
        "energy" => Scheme::EnergyRegions { constellation: need()? },
        "noncoherent_ml" => Scheme::NoncoherentMl {
            levels: need()?.levels().to_vec(),
            stats: stats()?,
        },
        "ask_ml" => Scheme::AskEnergyMl {
            levels: need()?.levels().to_vec(),
            stats: stats()?,
        },
        "pilot_pam" => Scheme::PilotPam {
            pam: pam_constellation(pam_levels).map_err(err)?,
            stats: stats()?,
            block_len,
            pilots,
            pilot_amp: 1.0,
        },
        other => return Err(PyValueError::new_err(format!("unknown scheme {other:?}"))),
    };
    let s = SimScenario::new(scheme, channel.0, sigma2, n)
        .with_symbols(symbols)
        .with_seed(seed)
        .with_shards(shards)
        .with_min_bit_errors(min_bit_errors);
    s.validate().map_err(err)?;
    Ok(s)
}

/// Monte Carlo SER/BER. `scheme` is one of "energy", "noncoherent_ml",
/// "ask_ml" or "pilot_pam". Decoders assume `assumed_channel` and
/// `assumed_sigma2` when given, the true channel otherwise.
#[pyfunction]
#[pyo3(signature = (
    constellation, channel, sigma2, n, symbols=100_000, seed=0, shards=1, scheme="energy",
    assumed_channel=None, assumed_sigma2=None, pam_levels=2, block_len=1, pilots=0, min_bit_errors=None,
))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    constellation: Option<&Constellation>,
    channel: &Channel,
    sigma2: f64,
    n: usize,
    symbols: u64,
    seed: u64,
    shards: usize,
    scheme: &str,
    assumed_channel: Option<&Channel>,
    assumed_sigma2: Option<f64>,
    pam_levels: usize,
    block_len: usize,
    pilots: usize,
    min_bit_errors: Option<u64>,
) -> PyResult<SimReport> {
    let assumed = assumed_channel.map(|c| (c, assumed_sigma2.unwrap_or(sigma2)));
    let s = scenario(
        scheme,
        constellation,
        channel,
        sigma2,
        n,
        symbols,
        seed,
        shards,
        assumed,
        pam_levels,
        block_len,
        pilots,
        min_bit_errors,
    )?;
    py.allow_threads(|| mc_simulate(&s)).map(SimReport::from).map_err(err)
}

/// Smallest antenna count with BER Wilson upper bound below `target_ber`,
/// or `None` when `n_max` antennas do not suffice.
#[pyfunction]
#[pyo3(signature = (
    constellation, channel, sigma2, target_ber, n_max=2048, symbols=200_000, seed=0, shards=1, scheme="energy",
    pam_levels=2, block_len=1, pilots=0,
))]
#[allow(clippy::too_many_arguments)]
fn min_antennas(
    py: Python<'_>,
    constellation: Option<&Constellation>,
    channel: &Channel,
    sigma2: f64,
    target_ber: f64,
    n_max: usize,
    symbols: u64,
    seed: u64,
    shards: usize,
    scheme: &str,
    pam_levels: usize,
    block_len: usize,
    pilots: usize,
) -> PyResult<Option<usize>> {
    let s = scenario(
        scheme,
        constellation,
        channel,
        sigma2,
        1,
        symbols,
        seed,
        shards,
        None,
        pam_levels,
        block_len,
        pilots,
        None,
    )?;
    Ok(match py.allow_threads(|| mc_min_antennas(&s, target_ber, n_max)).map_err(err)? {
        MinAntennas::Found { n, .. } => Some(n),
        MinAntennas::NotReached { .. } => None,
    })
}

/// Histogram of the energy statistic per symbol as a dict with `edges`,
/// `counts`, `means`, `variances`, `outside`, `boundaries`,
/// `receiver_points` and `overlap`.
#[pyfunction]
#[pyo3(signature = (constellation, channel, sigma2, n, trials=10_000, bins=50, seed=0))]
#[allow(clippy::too_many_arguments)]
fn histogram<'py>(
    py: Python<'py>,
    constellation: &Constellation,
    channel: &Channel,
    sigma2: f64,
    n: usize,
    trials: usize,
    bins: usize,
    seed: u64,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let c = constellation.0.clone();
    let ch = channel.0;
    let h = py.allow_threads(|| mc_histogram(&c, &ch, sigma2, n, trials, bins, seed)).map_err(err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("overlap", h.overlap())?;
    d.set_item("edges", h.edges)?;
    d.set_item("counts", h.counts)?;
    d.set_item("means", h.means)?;
    d.set_item("variances", h.variances)?;
    d.set_item("outside", h.outside)?;
    d.set_item("boundaries", h.boundaries)?;
    d.set_item("receiver_points", h.receiver_points)?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "energy_simo")]
fn energy_simo_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Channel>()?;
    m.add_class::<RateOracle>()?;
    m.add_class::<Constellation>()?;
    m.add_class::<DesignOutcome>()?;
    m.add_class::<SimReport>()?;
    m.add_function(wrap_pyfunction!(noise_power, m)?)?;
    m.add_function(wrap_pyfunction!(py_design_exact, m)?)?;
    m.add_function(wrap_pyfunction!(py_design_moments, m)?)?;
    m.add_function(wrap_pyfunction!(py_design_robust, m)?)?;
    m.add_function(wrap_pyfunction!(rician_box, m)?)?;
    m.add_function(wrap_pyfunction!(min_distance, m)?)?;
    m.add_function(wrap_pyfunction!(ask, m)?)?;
    m.add_function(wrap_pyfunction!(with_equalized_regions, m)?)?;
    m.add_function(wrap_pyfunction!(pam_amplitudes, m)?)?;
    m.add_function(wrap_pyfunction!(chernoff_ser_bound, m)?)?;
    m.add_function(wrap_pyfunction!(error_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(level_exponents, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(min_antennas, m)?)?;
    m.add_function(wrap_pyfunction!(histogram, m)?)?;
    Ok(())
}
