//! Deterministic weight functions w̃(u) applied to the pooled KM CDF value
//! u = F̂(t−), including the crossing-hazard weight.

use crate::error::{Error, Result};

/// A weight function choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSpec {
    /// w̃(u) = 1 (the logrank weight).
    Constant,
    /// Fleming-Harrington G^{ρ,γ}: w̃(u) = (1−u)^ρ·u^γ with Ŝ = 1−u.
    RhoGamma { rho: f64, gamma: f64 },
    /// Crossing weight: −1 at u=0, zero at u=θ, →1 at u=1, piecewise linear.
    Crossing { theta: f64 },
}

impl WeightSpec {
    pub fn rho_gamma(rho: f64, gamma: f64) -> Result<Self> {
        if rho < 0.0 || gamma < 0.0 {
            return Err(Error::Domain(format!("rho, gamma must be >= 0, got ({rho}, {gamma})")));
        }
        Ok(Self::RhoGamma { rho, gamma })
    }

    pub fn crossing(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::Domain(format!("theta must lie strictly in (0,1), got {theta}")));
        }
        Ok(Self::Crossing { theta })
    }

    pub fn label(&self) -> String {
        match self {
            Self::Constant => "1".into(),
            Self::RhoGamma { rho, gamma } => format!("G({rho},{gamma})"),
            Self::Crossing { theta } => format!("crossing({theta})"),
        }
    }
}

/// Evaluate the weight at a pooled CDF value u ∈ [0, 1).
pub fn eval_weight(spec: &WeightSpec, u: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::Domain(format!("weight argument must lie in [0,1), got {u}")));
    }
    Ok(match *spec {
        WeightSpec::Constant => 1.0,
        WeightSpec::RhoGamma { rho, gamma } => pow_nn(1.0 - u, rho) * pow_nn(u, gamma),
        WeightSpec::Crossing { theta } => {
            if u <= theta {
                (u - theta) / theta
            } else {
                (u - theta) / (1.0 - theta)
            }
        }
    })
}

// x^p with the 0^0 = 1 convention and fast paths for the common exponents.
fn pow_nn(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if p == 1.0 {
        x
    } else {
        x.powf(p)
    }
}

/// An ordered list of weight functions forming one maximum/projection test.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    name: String,
    specs: Vec<WeightSpec>,
}

impl WeightSet {
    pub fn new(name: impl Into<String>, specs: Vec<WeightSpec>) -> Result<Self> {
        if specs.is_empty() || specs.len() > 8 {
            return Err(Error::Domain(format!(
                "weight sets hold between 1 and 8 functions, got {}",
                specs.len()
            )));
        }
        Ok(Self { name: name.into(), specs })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn specs(&self) -> &[WeightSpec] {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }
}

/// Look up a named weight set.
///
/// Recognized names: `logrank`, `fh11`, `maxcombo`, `phi-star(θ)` (one θ),
/// `phi-star(θ1,θ2,...)` (crossing weights only) and `projection-crossing`.
pub fn builtin_set(name: &str) -> Result<WeightSet> {
    let trimmed = name.trim();
    match trimmed {
        "logrank" => return WeightSet::new("logrank", vec![WeightSpec::Constant]),
        "fh11" => return WeightSet::new("fh11", vec![WeightSpec::rho_gamma(1.0, 1.0)?]),
        "maxcombo" => {
            // G^{0,0}, G^{0,1}, G^{1,0}, G^{1,1} = {1, u, 1−u, u(1−u)}.
            return WeightSet::new(
                "maxcombo",
                vec![
                    WeightSpec::Constant,
                    WeightSpec::rho_gamma(0.0, 1.0)?,
                    WeightSpec::rho_gamma(1.0, 0.0)?,
                    WeightSpec::rho_gamma(1.0, 1.0)?,
                ],
            );
        }
        "projection-crossing" => {
            // {1, u, 2u−1}, the crossing-aware projection basis.
            return WeightSet::new(
                "projection-crossing",
                vec![
                    WeightSpec::Constant,
                    WeightSpec::rho_gamma(0.0, 1.0)?,
                    WeightSpec::crossing(0.5)?,
                ],
            );
        }
        _ => {}
    }
    if let Some(args) = trimmed.strip_prefix("phi-star(").and_then(|s| s.strip_suffix(')')) {
        let thetas: Vec<f64> = args
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::UnknownName(format!("bad theta '{t}' in '{name}'")))
            })
            .collect::<Result<_>>()?;
        let specs = phi_star_specs(&thetas)?;
        return WeightSet::new(phi_star_name(&thetas), specs);
    }
    Err(Error::UnknownName(format!("unknown weight set '{name}'")))
}

/// Specs for the crossing-aware maximum tests: a single θ gives
/// {1, u, 1−u, crossing(θ)}; several θs give {1, crossing(θ1), ...}.
pub fn phi_star_specs(thetas: &[f64]) -> Result<Vec<WeightSpec>> {
    match thetas {
        [] => Err(Error::Domain("phi-star requires at least one theta".into())),
        [theta] => Ok(vec![
            WeightSpec::Constant,
            WeightSpec::rho_gamma(0.0, 1.0)?,
            WeightSpec::rho_gamma(1.0, 0.0)?,
            WeightSpec::crossing(*theta)?,
        ]),
        many => {
            let mut specs = vec![WeightSpec::Constant];
            for &t in many {
                specs.push(WeightSpec::crossing(t)?);
            }
            Ok(specs)
        }
    }
}

/// Canonical display name for a phi-star theta list.
pub fn phi_star_name(thetas: &[f64]) -> String {
    format!(
        "phi-star({})",
        thetas.iter().map(|t| format!("{t}")).collect::<Vec<_>>().join(",")
    )
}
