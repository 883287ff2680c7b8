//! RF charging model: free-space and log-distance path loss, per-frame
//! received charge, and the aggregate charge a cell receives from all ETs.
//!
//! Both path-loss formulas work in dB with base-10 logarithms. The charge
//! formula multiplies a dB-domain power margin by the charging window and
//! the circuit efficiency; the result is kept in these literal "charge
//! units" and may be negative. Nothing here clamps or rescales: every
//! downstream consumer (constraints, sweeps) only relies on charge being
//! strictly decreasing in distance.

use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Cell, EnergyTransmitter, GridEnvironment, manhattan_distance};

#[derive(Debug, Error, PartialEq)]
pub enum RadioError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("operation time {op_time_s} s must lie strictly inside the frame of {frame_s} s")]
    BadFrame { frame_s: f64, op_time_s: f64 },
    #[error("charge efficiency must be in (0, 1], got {0}")]
    BadEfficiency(f64),
    #[error("path loss rate must be in [2, 6], got {0}")]
    BadPathLossRate(f64),
    #[error("{name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
    #[error("cannot take charge bounds of an environment with no free cells")]
    NoFreeCells,
}

/// Amount of charge in the model's literal charge units
/// (dB-domain power margin x seconds x efficiency). May be negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct ChargeAmount(f64);

impl ChargeAmount {
    pub const ZERO: ChargeAmount = ChargeAmount(0.0);

    pub fn new(value: f64) -> Self {
        ChargeAmount(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Add for ChargeAmount {
    type Output = ChargeAmount;

    fn add(self, rhs: ChargeAmount) -> ChargeAmount {
        ChargeAmount(self.0 + rhs.0)
    }
}

impl AddAssign for ChargeAmount {
    fn add_assign(&mut self, rhs: ChargeAmount) {
        self.0 += rhs.0;
    }
}

impl Sum for ChargeAmount {
    fn sum<I: Iterator<Item = ChargeAmount>>(iter: I) -> ChargeAmount {
        iter.fold(ChargeAmount::ZERO, Add::add)
    }
}

/// Radio, time-frame, and charging-circuit parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioParams {
    /// ET transmit power in dBm.
    pub tx_power_dbm: f64,
    /// Carrier frequency in GHz.
    pub freq_ghz: f64,
    /// Path loss rate (exponent), dimensionless, 2 to 6.
    pub path_loss_rate: f64,
    /// Reference distance for the log-distance model, meters.
    pub ref_distance_m: f64,
    /// Charging-circuit efficiency in (0, 1].
    pub charge_efficiency: f64,
    /// Frame length in seconds; a frame is one charging window plus one
    /// operation window.
    pub frame_s: f64,
    /// Operation time within a frame, seconds; charging lasts the remaining
    /// `frame_s - op_time_s`.
    pub op_time_s: f64,
    /// Power the sensor's receiver circuit consumes, dBm.
    pub rx_power_dbm: f64,
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), RadioError> {
        for (name, value) in [
            ("tx_power_dbm", self.tx_power_dbm),
            ("rx_power_dbm", self.rx_power_dbm),
        ] {
            if !value.is_finite() {
                return Err(RadioError::NotFinite { name, value });
            }
        }
        for (name, value) in [("freq_ghz", self.freq_ghz), ("ref_distance_m", self.ref_distance_m)]
        {
            if !(value.is_finite() && value > 0.0) {
                return Err(RadioError::NonPositive { name, value });
            }
        }
        if !(self.charge_efficiency.is_finite()
            && self.charge_efficiency > 0.0
            && self.charge_efficiency <= 1.0)
        {
            return Err(RadioError::BadEfficiency(self.charge_efficiency));
        }
        if !(self.path_loss_rate.is_finite()
            && (2.0..=6.0).contains(&self.path_loss_rate))
        {
            return Err(RadioError::BadPathLossRate(self.path_loss_rate));
        }
        if !(self.frame_s.is_finite()
            && self.op_time_s.is_finite()
            && self.op_time_s > 0.0
            && self.op_time_s < self.frame_s)
        {
            return Err(RadioError::BadFrame { frame_s: self.frame_s, op_time_s: self.op_time_s });
        }
        Ok(())
    }

    /// Length of the charging window at the start of each frame, seconds.
    pub fn charging_window_s(&self) -> f64 {
        self.frame_s - self.op_time_s
    }
}

/// The bundled test-bed parameter set: 50 dBm transmitters at 2 GHz,
/// path loss rate 2 over a 5 m reference distance, 0.5 circuit efficiency,
/// 10 s frames with 9.5 s of operation, 30 dBm receiver consumption.
pub fn testbed_radio_params() -> RadioParams {
    RadioParams {
        tx_power_dbm: 50.0,
        freq_ghz: 2.0,
        path_loss_rate: 2.0,
        ref_distance_m: 5.0,
        charge_efficiency: 0.5,
        frame_s: 10.0,
        op_time_s: 9.5,
        rx_power_dbm: 30.0,
    }
}

/// Free-space path loss at the reference distance, in dB:
/// `20*log10(d0) + 20*log10(f) + 92.5`.
pub fn free_space_path_loss(d0_m: f64, freq_ghz: f64) -> Result<f64, RadioError> {
    if !(d0_m.is_finite() && d0_m > 0.0) {
        return Err(RadioError::NonPositive { name: "d0_m", value: d0_m });
    }
    if !(freq_ghz.is_finite() && freq_ghz > 0.0) {
        return Err(RadioError::NonPositive { name: "freq_ghz", value: freq_ghz });
    }
    Ok(20.0 * d0_m.log10() + 20.0 * freq_ghz.log10() + 92.5)
}

/// Log-distance path loss at physical distance `d_m`, in dB:
/// free-space loss at the reference distance plus `10*w*log10(d/d0)`.
pub fn log_distance_path_loss(d_m: f64, params: &RadioParams) -> Result<f64, RadioError> {
    if !(d_m.is_finite() && d_m > 0.0) {
        return Err(RadioError::NonPositive { name: "d_m", value: d_m });
    }
    let base = free_space_path_loss(params.ref_distance_m, params.freq_ghz)?;
    Ok(base + 10.0 * params.path_loss_rate * (d_m / params.ref_distance_m).log10())
}

/// Charge received from one ET at distance `d_m` within a single frame:
/// `(T_E - PL_T(d) - P_r) * (T - tau) * efficiency`. May be negative.
pub fn received_charge_per_frame(
    d_m: f64,
    params: &RadioParams,
) -> Result<ChargeAmount, RadioError> {
    let path_loss = log_distance_path_loss(d_m, params)?;
    let margin = params.tx_power_dbm - path_loss - params.rx_power_dbm;
    Ok(ChargeAmount::new(
        margin * params.charging_window_s() * params.charge_efficiency,
    ))
}

/// Total per-frame charge a cell receives, summed over every ET.
///
/// The cell must be a free cell; a cell coinciding with an ET has zero
/// distance and is rejected.
pub fn total_received_charge(
    cell: Cell,
    ets: &[EnergyTransmitter],
    env: &GridEnvironment,
    params: &RadioParams,
) -> Result<ChargeAmount, RadioError> {
    let mut total = ChargeAmount::ZERO;
    for et in ets {
        let cells = manhattan_distance(cell, et.cell);
        total += received_charge_per_frame(env.physical_distance_m(cells), params)?;
    }
    Ok(total)
}

/// Minimum and maximum of `total_received_charge` over all free cells.
///
/// Sweep grids for the charging requirement are derived from this range,
/// so that they always bracket the achievable charge of the environment.
pub fn charge_bounds(
    env: &GridEnvironment,
    ets: &[EnergyTransmitter],
    params: &RadioParams,
) -> Result<(ChargeAmount, ChargeAmount), RadioError> {
    let mut cells = env.free_cells().iter();
    let first = cells.next().ok_or(RadioError::NoFreeCells)?;
    let mut min = total_received_charge(*first, ets, env, params)?;
    let mut max = min;
    for &cell in cells {
        let charge = total_received_charge(cell, ets, env, params)?;
        if charge < min {
            min = charge;
        }
        if charge > max {
            max = charge;
        }
    }
    Ok((min, max))
}
