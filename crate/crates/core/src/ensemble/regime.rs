//! Where an ensemble's margin and certificate land relative to its members'.

use alloc::vec::Vec;

use super::{is_zero_gap, EnsembleSpec};
use crate::certificates::{s_certificate, Mode, Smoothness};
use crate::geometry::{subset, subset_of_union, Containment, Region};
use crate::{tol, Result};

/// Ensemble margin `r^g` against the best (`r̄`) and worst (`r̲`) member
/// margins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GapRegime {
    /// `r^g > r̄`.
    Gain,
    /// `r̲ <= r^g <= r̄`.
    Inconclusive,
    /// `r^g < r̲` with `r^g > 0`.
    Loss,
    /// `r^g = 0` while every member has a positive margin.
    ZeroGap,
}

impl GapRegime {
    pub fn classify(rg: f64, r_bar: f64, r_under: f64) -> GapRegime {
        if rg > r_bar + tol::GAP_REGIME {
            GapRegime::Gain
        } else if rg < r_under - tol::GAP_REGIME {
            if is_zero_gap(rg) {
                GapRegime::ZeroGap
            } else {
                GapRegime::Loss
            }
        } else {
            GapRegime::Inconclusive
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GapRegime::Gain => "gain",
            GapRegime::Inconclusive => "inconclusive",
            GapRegime::Loss => "loss",
            GapRegime::ZeroGap => "zero",
        }
    }
}

/// Ensemble certificate `Q_g` against the members' `Qⱼ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CertRegime {
    /// `Q_g` strictly contains `∪ Qⱼ`.
    Improvement,
    /// `∩ Qⱼ ⊆ Q_g ⊆ ∪ Qⱼ`.
    Between,
    /// `Q_g` is strictly inside `∩ Qⱼ`.
    Reduction,
    /// None of the above (or not decidable within tolerance).
    Indeterminate,
}

impl CertRegime {
    pub fn label(self) -> &'static str {
        match self {
            CertRegime::Improvement => "improvement",
            CertRegime::Between => "between",
            CertRegime::Reduction => "reduction",
            CertRegime::Indeterminate => "indeterminate",
        }
    }
}

/// The four containment tests a certificate regime is read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evidence {
    /// Every `Qⱼ ⊆ Q_g`.
    pub members_in_ensemble: Containment,
    /// `Q_g ⊆ ∪ Qⱼ`.
    pub ensemble_in_union: Containment,
    /// `∩ Qⱼ ⊆ Q_g`.
    pub intersection_in_ensemble: Containment,
    /// `Q_g ⊆` every `Qⱼ`.
    pub ensemble_in_members: Containment,
    /// Decided from margins alone (all members share one gradient set).
    pub from_margins: bool,
}

impl Evidence {
    pub fn regime(&self) -> CertRegime {
        if self.members_in_ensemble.holds && self.ensemble_in_union.strictly_fails {
            CertRegime::Improvement
        } else if self.ensemble_in_members.holds && self.intersection_in_ensemble.strictly_fails {
            CertRegime::Reduction
        } else if self.intersection_in_ensemble.holds && self.ensemble_in_union.holds {
            CertRegime::Between
        } else {
            CertRegime::Indeterminate
        }
    }

    pub fn exact(&self) -> bool {
        self.members_in_ensemble.exact
            && self.ensemble_in_union.exact
            && self.intersection_in_ensemble.exact
            && self.ensemble_in_members.exact
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub gap_regime: GapRegime,
    pub cert_regime: CertRegime,
    /// `r^g_{c_B}`.
    pub ensemble_margin: f64,
    /// `r̄`.
    pub best_member_margin: f64,
    /// `r̲`.
    pub worst_member_margin: f64,
    pub evidence: Evidence,
    /// For more than two members: regimes of the left-to-right folded pairs
    /// `(f¹ ⊕ … ⊕ fʲ, fʲ⁺¹)`.
    pub folded: Vec<CertRegime>,
}

fn all(cs: impl IntoIterator<Item = Containment>) -> Containment {
    let mut out = Containment {
        holds: true,
        strictly_fails: false,
        exact: true,
    };
    for c in cs {
        out.holds &= c.holds;
        out.strictly_fails |= c.strictly_fails;
        out.exact &= c.exact;
    }
    out
}

fn by_level(a: f64, b: f64, degenerate: bool) -> Containment {
    let e = if degenerate { f64::NEG_INFINITY } else { a - b };
    Containment {
        holds: e <= tol::GEOMETRY,
        strictly_fails: e > tol::STRICT,
        exact: true,
    }
}

/// Gap and certificate regimes of the ensemble, using S-certificates in
/// the members' smoothness mode. When every member shares one uniform
/// gradient set the certificates are scaled copies of one region and the
/// regime follows from the margins.
pub fn classify_regimes(spec: &EnsembleSpec) -> Result<RegimeReport> {
    let logits = spec.logit_view();
    let rg = logits.margin();
    let r_bar = logits.best_member_margin();
    let r_under = logits.worst_member_margin();
    let gap_regime = GapRegime::classify(rg, r_bar, r_under);
    let evidence = if spec.shares_uniform_body() {
        let Smoothness::Uniform(s) = spec.members()[0].smoothness() else {
            unreachable!("checked by shares_uniform_body")
        };
        let degenerate = s.minkowski_sum(&s.negate())?.is_origin();
        let margins: Vec<f64> = logits.member_gaps().iter().map(|g| g.margin()).collect();
        Evidence {
            members_in_ensemble: all(margins.iter().map(|m| by_level(*m, rg, degenerate))),
            ensemble_in_union: by_level(rg, r_bar, degenerate),
            intersection_in_ensemble: by_level(r_under, rg, degenerate),
            ensemble_in_members: all(margins.iter().map(|m| by_level(rg, *m, degenerate))),
            from_margins: true,
        }
    } else {
        geometric_evidence(spec)?
    };
    let folded = if spec.members().len() > 2 {
        folded_regimes(spec)?
    } else {
        Vec::new()
    };
    Ok(RegimeReport {
        gap_regime,
        cert_regime: evidence.regime(),
        ensemble_margin: rg,
        best_member_margin: r_bar,
        worst_member_margin: r_under,
        evidence,
        folded,
    })
}

fn geometric_evidence(spec: &EnsembleSpec) -> Result<Evidence> {
    let mode: Mode = spec.mode();
    let q: Vec<Region> = spec
        .members()
        .iter()
        .map(|m| Ok(s_certificate(m, mode)?.region))
        .collect::<Result<_>>()?;
    let qg = s_certificate(&spec.ensemble_classifier()?, mode)?.region;
    let refs: Vec<&Region> = q.iter().collect();
    let inter = Region::intersection(spec.dim(), q.clone())?;
    Ok(Evidence {
        members_in_ensemble: all(q.iter().map(|r| subset(r, &qg)).collect::<Result<Vec<_>>>()?),
        ensemble_in_union: subset_of_union(&qg, &refs)?,
        intersection_in_ensemble: subset(&inter, &qg)?,
        ensemble_in_members: all(q.iter().map(|r| subset(&qg, r)).collect::<Result<Vec<_>>>()?),
        from_margins: false,
    })
}

fn folded_regimes(spec: &EnsembleSpec) -> Result<Vec<CertRegime>> {
    let members = spec.members();
    let w = spec.weights();
    let mut acc = members[0].clone();
    let mut acc_weight = w[0];
    let mut out = Vec::with_capacity(members.len() - 1);
    for j in 1..members.len() {
        let pair_weights = if acc_weight + w[j] > 0.0 {
            [acc_weight, w[j]]
        } else {
            [1.0, 1.0]
        };
        let pair = EnsembleSpec::new(alloc::vec![acc.clone(), members[j].clone()], &pair_weights)?;
        out.push(classify_regimes(&pair)?.cert_regime);
        acc = pair.ensemble_classifier()?;
        acc_weight += w[j];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::ClassifierAtPoint;
    use crate::geometry::ConvexBody;
    use crate::{Matrix, Vector};
    use alloc::vec;

    fn sector(logits: Vec<f64>) -> ClassifierAtPoint {
        let s = ConvexBody::points(vec![
            Vector::from([1.0, 0.0]),
            Vector::from([0.0, 1.0]),
            Vector::from([-1.0, -1.0]),
        ])
        .unwrap();
        ClassifierAtPoint::new(logits, Smoothness::Uniform(s)).unwrap()
    }

    #[test]
    fn shared_body_same_top_two_is_between() {
        let spec = EnsembleSpec::new(
            vec![sector(vec![0.6, 0.3, 0.1]), sector(vec![0.5, 0.4, 0.1])],
            &[0.3, 0.7],
        )
        .unwrap();
        let r = classify_regimes(&spec).unwrap();
        assert_eq!(r.cert_regime, CertRegime::Between);
        assert_eq!(r.gap_regime, GapRegime::Inconclusive);
        assert!(r.evidence.from_margins);
    }

    #[test]
    fn crossing_tops_collapse_to_reduction() {
        let spec = EnsembleSpec::uniform(vec![
            sector(vec![0.6, 0.3, 0.1]),
            sector(vec![0.3, 0.6, 0.1]),
        ])
        .unwrap();
        let r = classify_regimes(&spec).unwrap();
        assert_eq!(r.gap_regime, GapRegime::ZeroGap);
        assert_eq!(r.cert_regime, CertRegime::Reduction);
    }

    #[test]
    fn mirrored_runner_ups_gain() {
        let spec = EnsembleSpec::uniform(vec![
            sector(vec![0.5, 0.45, 0.05]),
            sector(vec![0.5, 0.05, 0.45]),
        ])
        .unwrap();
        let r = classify_regimes(&spec).unwrap();
        assert_eq!(r.gap_regime, GapRegime::Gain);
        assert_eq!(r.cert_regime, CertRegime::Improvement);
    }

    #[test]
    fn geometric_path_agrees_with_margins() {
        // Same regions through class-wise data, forcing LP containment.
        let s = ConvexBody::points(vec![
            Vector::from([1.0, 0.0]),
            Vector::from([0.0, 1.0]),
            Vector::from([-1.0, -1.0]),
        ])
        .unwrap();
        let cw = |l: Vec<f64>| {
            ClassifierAtPoint::new(l, Smoothness::ClassWise(vec![s.clone(), s.clone(), s.clone()]))
                .unwrap()
        };
        for (f1, f2, expect) in [
            (vec![0.5, 0.45, 0.05], vec![0.5, 0.05, 0.45], CertRegime::Improvement),
            (vec![0.6, 0.3, 0.1], vec![0.5, 0.4, 0.1], CertRegime::Between),
            (vec![0.6, 0.3, 0.1], vec![0.3, 0.6, 0.1], CertRegime::Reduction),
        ] {
            let spec = EnsembleSpec::uniform(vec![cw(f1), cw(f2)]).unwrap();
            let r = classify_regimes(&spec).unwrap();
            assert!(!r.evidence.from_margins);
            assert!(r.evidence.exact());
            assert_eq!(r.cert_regime, expect);
        }
    }

    #[test]
    fn anisotropic_pair_is_between() {
        let e = |a, b| {
            ClassifierAtPoint::new(
                vec![1.0, 0.0],
                Smoothness::Uniform(ConvexBody::ellipsoid(Matrix::diagonal(&[a, b]), 1.0).unwrap()),
            )
            .unwrap()
        };
        let spec = EnsembleSpec::uniform(vec![e(4.0, 0.25), e(0.25, 4.0)]).unwrap();
        let r = classify_regimes(&spec).unwrap();
        assert_eq!(r.cert_regime, CertRegime::Between);
        assert!(!r.evidence.exact());
    }

    #[test]
    fn three_members_fold() {
        let spec = EnsembleSpec::uniform(vec![
            sector(vec![0.6, 0.3, 0.1]),
            sector(vec![0.5, 0.4, 0.1]),
            sector(vec![0.7, 0.2, 0.1]),
        ])
        .unwrap();
        let r = classify_regimes(&spec).unwrap();
        assert_eq!(r.folded, vec![CertRegime::Between, CertRegime::Between]);
    }
}
