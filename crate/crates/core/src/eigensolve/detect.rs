use serde::{Deserialize, Serialize};

use super::SpectralResult;
use crate::discretize::TruncBc;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "bound state")]
    BoundState,
    #[serde(rename = "none detected")]
    NoneDetected,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::BoundState => "bound state",
            Verdict::NoneDetected => "none detected",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Lowest eigenvalue under each artificial condition at `s = ±L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub dirichlet_value: f64,
    pub neumann_value: f64,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.dirichlet_value - self.neumann_value
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub threshold: f64,
    pub coarse: Bracket,
    pub fine: Bracket,
    pub extrapolated: Bracket,
    /// Extrapolated minus fine value, per truncation.
    pub correction: Bracket,
    pub margin: f64,
    pub verdict: Verdict,
}

/// Order-2 Richardson extrapolation from grids `h` and `h/2`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    fine + (fine - coarse) / 3.0
}

/// Decides on a bound state from the lowest eigenvalue at two nested grids,
/// each under both truncation conditions.
pub fn detect_bound_states(
    coarse_dirichlet: &SpectralResult,
    coarse_neumann: &SpectralResult,
    fine_dirichlet: &SpectralResult,
    fine_neumann: &SpectralResult,
) -> Result<Detection> {
    let inputs = [
        (coarse_dirichlet, TruncBc::Dirichlet, 1),
        (coarse_neumann, TruncBc::Neumann, 1),
        (fine_dirichlet, TruncBc::Dirichlet, 2),
        (fine_neumann, TruncBc::Neumann, 2),
    ];
    for (r, bc, scale) in inputs {
        if r.trunc_bc() != bc
            || r.grid.ns != scale * coarse_dirichlet.grid.ns
            || r.grid.nu != scale * coarse_dirichlet.grid.nu
            || r.grid.half_length != coarse_dirichlet.grid.half_length
        {
            return Err(Error::Argument(
                "detection needs both truncations on a grid and its uniform refinement".into(),
            ));
        }
    }
    let threshold = coarse_dirichlet.threshold;
    let coarse = Bracket {
        dirichlet_value: coarse_dirichlet.lowest(),
        neumann_value: coarse_neumann.lowest(),
    };
    let fine = Bracket {
        dirichlet_value: fine_dirichlet.lowest(),
        neumann_value: fine_neumann.lowest(),
    };
    let extrapolated = Bracket {
        dirichlet_value: richardson(coarse.dirichlet_value, fine.dirichlet_value),
        neumann_value: richardson(coarse.neumann_value, fine.neumann_value),
    };
    let correction = Bracket {
        dirichlet_value: extrapolated.dirichlet_value - fine.dirichlet_value,
        neumann_value: extrapolated.neumann_value - fine.neumann_value,
    };
    let margin = (2.0 * correction.dirichlet_value.abs().max(correction.neumann_value.abs())).max(1e-4 * threshold);
    let verdict = if extrapolated.dirichlet_value < threshold - margin {
        Verdict::BoundState
    } else if extrapolated.neumann_value >= threshold - margin {
        Verdict::NoneDetected
    } else {
        Verdict::Inconclusive
    };
    Ok(Detection {
        threshold,
        coarse,
        fine,
        extrapolated,
        correction,
        margin,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::Grid;

    fn fake(bc: TruncBc, ns: usize, lambda: f64) -> SpectralResult {
        SpectralResult {
            eigenvalues: vec![lambda],
            residuals: vec![0.0],
            modes: vec![],
            converged: true,
            cycles: 1,
            shift: 0.0,
            threshold: 2.0,
            grid: Grid::new(5.0, ns, ns, bc).unwrap(),
        }
    }

    #[test]
    fn verdicts_follow_the_margin_policy() {
        let d = detect_bound_states(
            &fake(TruncBc::Dirichlet, 8, 1.90),
            &fake(TruncBc::Neumann, 8, 1.88),
            &fake(TruncBc::Dirichlet, 16, 1.87),
            &fake(TruncBc::Neumann, 16, 1.86),
        )
        .unwrap();
        assert!((d.extrapolated.dirichlet_value - 1.86).abs() < 1e-12);
        assert!((d.margin - 0.02).abs() < 1e-12);
        assert_eq!(d.verdict, Verdict::BoundState);

        let d = detect_bound_states(
            &fake(TruncBc::Dirichlet, 8, 2.1),
            &fake(TruncBc::Neumann, 8, 2.0004),
            &fake(TruncBc::Dirichlet, 16, 2.05),
            &fake(TruncBc::Neumann, 16, 2.0001),
        )
        .unwrap();
        assert_eq!(d.verdict, Verdict::NoneDetected);

        let d = detect_bound_states(
            &fake(TruncBc::Dirichlet, 8, 2.1),
            &fake(TruncBc::Neumann, 8, 1.90),
            &fake(TruncBc::Dirichlet, 16, 2.05),
            &fake(TruncBc::Neumann, 16, 1.90),
        )
        .unwrap();
        assert_eq!(d.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let a = fake(TruncBc::Dirichlet, 8, 1.0);
        assert!(detect_bound_states(&a, &a, &a, &a).is_err());
    }
}
