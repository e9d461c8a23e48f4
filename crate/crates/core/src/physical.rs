//! Conversion of abstract costs into physical quantities for a quantum Hall
//! sample: magnetic length, field bound, drift velocity, step rate, sample
//! area and wall-clock time. SI units throughout; gaps are given in kelvin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const HBAR: f64 = 1.0546e-34;
pub const ELEMENTARY_CHARGE: f64 = 1.6022e-19;
pub const BOLTZMANN: f64 = 1.3806e-23;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams<T> {
    pub gap_kelvin: T,
    pub b_tesla: T,
    /// Quasiparticle spacing in magnetic lengths.
    pub separation_factor: T,
    /// Derating of the raw drift-limited step rate.
    pub eta: T,
    pub packing: T,
    /// Quasiparticle charge in units of `e`.
    pub charge_fraction: T,
    /// Effective magnetic length in units of `l`.
    pub length_factor: T,
}

impl<T: Real> PhysicalParams<T> {
    /// nu = 5/2 Ising state.
    pub fn nu52() -> Self {
        Self {
            gap_kelvin: T::one(),
            b_tesla: T::lit(5.0),
            separation_factor: T::lit(100.0),
            eta: T::lit(0.0229),
            packing: T::lit(2.5),
            charge_fraction: T::lit(0.25),
            length_factor: T::lit(2.0),
        }
    }

    /// nu = 12/5 Fibonacci state: same sample, a tenth of the gap.
    pub fn nu125() -> Self {
        Self { gap_kelvin: T::lit(0.1), ..Self::nu52() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: T| x.is_finite() && x > T::zero();
        let nonneg = |x: T| x.is_finite() && x >= T::zero();
        if !nonneg(self.gap_kelvin) || !nonneg(self.eta) {
            return Err(Error::InvalidConfig("gap and eta must be non-negative".into()));
        }
        if !ok(self.b_tesla) || !ok(self.separation_factor) || !ok(self.packing) || !ok(self.length_factor) {
            return Err(Error::InvalidConfig("field, separation, packing and length factor must be positive".into()));
        }
        if !(self.charge_fraction > T::zero() && self.charge_fraction <= T::one()) {
            return Err(Error::InvalidConfig("charge_fraction must lie in (0, 1]".into()));
        }
        Ok(())
    }

    fn gap_joules(&self) -> T {
        T::lit(BOLTZMANN) * self.gap_kelvin
    }
}

/// `sqrt(hbar / (e B))` in meters.
pub fn magnetic_length<T: Real>(b_tesla: T) -> T {
    (T::lit(HBAR) / (T::lit(ELEMENTARY_CHARGE) * b_tesla)).sqrt()
}

pub fn drift_velocity<T: Real>(p: &PhysicalParams<T>) -> T {
    p.gap_joules() * magnetic_length(p.b_tesla) / T::lit(HBAR)
}

pub fn max_field<T: Real>(p: &PhysicalParams<T>) -> T {
    let charge = p.charge_fraction * T::lit(ELEMENTARY_CHARGE);
    p.gap_joules() / (charge * p.length_factor * magnetic_length(p.b_tesla))
}

/// Braid steps per second: drift velocity over one hop of `s` lengths.
pub fn step_rate<T: Real>(p: &PhysicalParams<T>) -> T {
    p.eta * p.gap_joules() / T::lit(HBAR) / p.separation_factor
}

pub fn sample_area<T: Real>(n_qp: T, p: &PhysicalParams<T>) -> T {
    let pitch = p.separation_factor * magnetic_length(p.b_tesla);
    p.packing * n_qp * pitch * pitch
}

/// Infinite when the rate is zero.
pub fn wall_clock<T: Real>(time_steps: T, p: &PhysicalParams<T>) -> T {
    if time_steps == T::zero() {
        return T::zero();
    }
    time_steps / step_rate(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalReport<T> {
    pub magnetic_length_m: T,
    pub max_field_v_per_m: T,
    pub drift_velocity_m_per_s: T,
    pub step_rate_hz: T,
    pub sample_area_m2: T,
    pub wall_clock_s: T,
}

pub fn physical_report<T: Real>(time_steps: T, n_qp: T, p: &PhysicalParams<T>) -> PhysicalReport<T> {
    PhysicalReport {
        magnetic_length_m: magnetic_length(p.b_tesla),
        max_field_v_per_m: max_field(p),
        drift_velocity_m_per_s: drift_velocity(p),
        step_rate_hz: step_rate(p),
        sample_area_m2: sample_area(n_qp, p),
        wall_clock_s: wall_clock(time_steps, p),
    }
}
