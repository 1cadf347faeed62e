//! Invariance of the induced geometry under constant gauge transformations.

use super::frame::{ConjugatedFrames, SolverFrames};
use super::{forms, Gauged, Potentials};
use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};

/// Largest absolute change of each quantity over the sampled points.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GaugeDeviation {
    pub metric: f64,
    pub second_form: f64,
    pub normal_connection: f64,
    pub curvature: f64,
}

impl GaugeDeviation {
    pub fn max(&self) -> f64 {
        self.metric
            .max(self.second_form)
            .max(self.normal_connection)
            .max(self.curvature)
    }
}

fn max_diff<'a>(a: impl Iterator<Item = &'a f64>, b: impl Iterator<Item = &'a f64>) -> f64 {
    a.zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Recomputes `g`, `b`, `mu` and `K` after `a_mu -> g a_mu g^-1 + ...` with
/// `g = exp(x)` constant, the normal frame conjugated alongside, and reports
/// the deviation from the untransformed values. Frames are anchored at the
/// first point.
pub fn gauge_invariance_check<P: Potentials + Clone>(
    p: &P,
    x: &AlgebraElement,
    points: &[(f64, f64)],
    h: f64,
) -> Result<GaugeDeviation> {
    let &(z0, zb0) = points
        .first()
        .ok_or_else(|| Error::InvalidInput("gauge check needs at least one point".into()))?;
    p.algebra().check(x)?;
    let gauged = Gauged::by_exp(p.clone(), x);
    let (frames, _) = SolverFrames::anchored(p, z0, zb0)?;
    let conj = ConjugatedFrames {
        inner: &frames,
        ad_g: gauged.ad_g.clone(),
    };
    let mut dev = GaugeDeviation::default();
    for &(z, zb) in points {
        let f0 = forms::point_forms(p, &frames, z, zb, h)?;
        let f1 = forms::point_forms(&gauged, &conj, z, zb, h)?;
        dev.metric = dev.metric.max(max_diff(f0.g.iter().flatten(), f1.g.iter().flatten()));
        dev.second_form = dev.second_form.max(max_diff(
            f0.b.iter().flatten().flatten(),
            f1.b.iter().flatten().flatten(),
        ));
        dev.normal_connection = dev.normal_connection.max(max_diff(
            f0.mu_conn.iter().flatten().flatten(),
            f1.mu_conn.iter().flatten().flatten(),
        ));
        dev.curvature = dev.curvature.max((f0.k_fd - f1.k_fd).abs());
    }
    Ok(dev)
}
