use super::roots::bracketed_root;
use super::GasModel;
use crate::error::{Error, Result};

/// Prandtl-Meyer angle `nu(M)` in radians.
pub fn prandtl_meyer(mach: f64, gas: &GasModel) -> Result<f64> {
    if !(mach >= 1.0) {
        return Err(Error::Subsonic(mach));
    }
    Ok(nu(mach, gas.gamma))
}

fn nu(mach: f64, gamma: f64) -> f64 {
    let k = (gamma + 1.0) / (gamma - 1.0);
    let m = (mach * mach - 1.0).sqrt();
    k.sqrt() * (m / k.sqrt()).atan() - m.atan()
}

/// Limit of `nu` as `M -> infinity`.
pub fn max_prandtl_meyer(gas: &GasModel) -> f64 {
    let k = (gas.gamma + 1.0) / (gas.gamma - 1.0);
    (k.sqrt() - 1.0) * std::f64::consts::FRAC_PI_2
}

/// Mach number with `nu(M) = angle`.
pub fn inverse_prandtl_meyer(angle: f64, gas: &GasModel) -> Result<f64> {
    if angle == 0.0 {
        return Ok(1.0);
    }
    if !(angle > 0.0 && angle < max_prandtl_meyer(gas)) {
        return Err(Error::InvalidState(format!(
            "Prandtl-Meyer angle {angle} outside (0, {})",
            max_prandtl_meyer(gas)
        )));
    }
    let mut hi = 2.0;
    while nu(hi, gas.gamma) < angle {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::InvalidState(format!(
                "Prandtl-Meyer angle {angle} too close to the limit"
            )));
        }
    }
    bracketed_root(|m| nu(m, gas.gamma) - angle, 1.0, hi, 1e-14)
        .ok_or_else(|| Error::InvalidState("Prandtl-Meyer inversion failed".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn nu_of_one_is_zero() {
        assert_eq!(prandtl_meyer(1.0, &GasModel::default()).unwrap(), 0.0);
        assert!(prandtl_meyer(0.9, &GasModel::default()).is_err());
    }

    #[test]
    fn nu_of_two_matches_direct_closed_form() {
        // sqrt(6) * atan(sqrt(1/2)) - atan(sqrt(3)), evaluated term by term
        let expected = 6.0f64.sqrt() * (0.5f64).sqrt().atan() - 3.0f64.sqrt().atan();
        let got = prandtl_meyer(2.0, &GasModel::default()).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got.to_degrees() - 26.379760813416457).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn inverse_round_trip(m in 1.0001f64..10.0) {
            let gas = GasModel::default();
            let a = prandtl_meyer(m, &gas).unwrap();
            let back = inverse_prandtl_meyer(a, &gas).unwrap();
            prop_assert!((back - m).abs() < 1e-10);
            prop_assert!((prandtl_meyer(back, &gas).unwrap() - a).abs() < 1e-12);
        }
    }
}
