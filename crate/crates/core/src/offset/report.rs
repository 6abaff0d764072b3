//! Pointwise verification of every offset relation on a sampled base surface.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io;

use rayon::prelude::*;

use super::{
    arc_length_ratio, invariant_relations, make_offset, offset_angle_from_curvatures,
    offset_distance, striction_deviation, BaseIntegrals, OffsetSpec,
};
use crate::dual::DualScalar;
use crate::error::Result;
use crate::surface::{dual_curvature, RuledSurface};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// The partners share `t̃`.
    CommonPerpendicular,
    /// `ds̄₁/ds̄ = cos θ̄ + γ̄ sin θ̄`.
    DualArcRatio,
    /// `ds₁/ds = cos θ + γ sin θ`.
    RealArcRatio,
    /// Integrated arc lengths `s₁` and `∫Δ₁ ds₁`.
    ArcLengthIntegrals,
    /// Integral developability criterion; developable bases only.
    DevelopableIntegral,
    /// `θ*` from `δ`, `Δ`, `γ` and the measured `δ₁`.
    OffsetDistance,
    /// `Δ₁` in base invariants.
    DistributionParameter,
    /// `Δ₁(cos θ + γ sin θ) = δ sin θ − θ*(sin θ − γ cos θ)`; developable bases only.
    DevelopableOffsetDistance,
    /// `γ₁ = (γ cos θ − sin θ)/(cos θ + γ sin θ)`.
    ConicalCurvature,
    /// `θ` recovered from `γ` and `γ₁`.
    OffsetAngle,
    /// Expanded closed form of `γ̄₁`; reported but not fatal.
    DualConicalCurvature,
    /// `R̄₁` in the `A`, `B` form.
    DualCurvature,
    /// `cos ρ̄₁` in the `A`, `B` form.
    DualSphericalRadius,
    /// `cot ρ₁`.
    SphericalRadius,
}

impl Relation {
    pub const ALL: [Relation; 14] = [
        Relation::CommonPerpendicular,
        Relation::DualArcRatio,
        Relation::RealArcRatio,
        Relation::ArcLengthIntegrals,
        Relation::DevelopableIntegral,
        Relation::OffsetDistance,
        Relation::DistributionParameter,
        Relation::DevelopableOffsetDistance,
        Relation::ConicalCurvature,
        Relation::OffsetAngle,
        Relation::DualConicalCurvature,
        Relation::DualCurvature,
        Relation::DualSphericalRadius,
        Relation::SphericalRadius,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Relation::CommonPerpendicular => "common_perpendicular",
            Relation::DualArcRatio => "dual_arc_ratio",
            Relation::RealArcRatio => "real_arc_ratio",
            Relation::ArcLengthIntegrals => "arc_length_integrals",
            Relation::DevelopableIntegral => "developable_integral",
            Relation::OffsetDistance => "offset_distance",
            Relation::DistributionParameter => "distribution_parameter",
            Relation::DevelopableOffsetDistance => "developable_offset_distance",
            Relation::ConicalCurvature => "conical_curvature",
            Relation::OffsetAngle => "offset_angle",
            Relation::DualConicalCurvature => "dual_conical_curvature",
            Relation::DualCurvature => "dual_curvature",
            Relation::DualSphericalRadius => "dual_spherical_radius",
            Relation::SphericalRadius => "spherical_radius",
        }
    }

    /// Whether a failure of this relation fails the report.
    pub fn fatal(self) -> bool {
        self != Relation::DualConicalCurvature
    }

    /// Whether the relation only applies to developable bases.
    pub fn needs_developable_base(self) -> bool {
        matches!(
            self,
            Relation::DevelopableIntegral | Relation::DevelopableOffsetDistance
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub relation: Relation,
    /// Which scalar of a multi-part relation (`real`, `dual`, ...), or empty.
    pub part: &'static str,
    pub s: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

impl ReportRow {
    pub fn new(relation: Relation, part: &'static str, s: f64, lhs: f64, rhs: f64) -> Self {
        let abs_err = (lhs - rhs).abs();
        Self {
            relation,
            part,
            s,
            lhs,
            rhs,
            abs_err,
            rel_err: abs_err / 1f64.max(lhs.abs()).max(rhs.abs()),
        }
    }

    pub fn relation_id(&self) -> String {
        if self.part.is_empty() {
            self.relation.id().to_string()
        } else {
            format!("{}.{}", self.relation.id(), self.part)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationSummary {
    pub relation: Relation,
    pub rows: usize,
    pub worst_abs: f64,
    pub worst_rel: f64,
    pub worst_s: f64,
}

#[derive(Debug, Clone)]
pub struct OffsetReport {
    pub spec: OffsetSpec,
    pub base_developable: bool,
    pub rows: Vec<ReportRow>,
    /// `max ‖c₁ − (c + θ* t)‖` over the samples, with `c₁` the offset's own striction curve.
    pub striction_deviation: f64,
}

impl OffsetReport {
    /// Relations that produced rows, in canonical order.
    pub fn summaries(&self) -> Vec<RelationSummary> {
        Relation::ALL
            .iter()
            .filter_map(|&relation| {
                let rows: Vec<&ReportRow> = self
                    .rows
                    .iter()
                    .filter(|r| r.relation == relation)
                    .collect();
                let worst = rows
                    .iter()
                    .copied()
                    .max_by(|a, b| a.rel_err.total_cmp(&b.rel_err))?;
                Some(RelationSummary {
                    relation,
                    rows: rows.len(),
                    worst_abs: rows.iter().map(|r| r.abs_err).fold(0.0, f64::max),
                    worst_rel: worst.rel_err,
                    worst_s: worst.s,
                })
            })
            .collect()
    }

    /// Worst relative residual over the fatal relations.
    pub fn worst_rel_err(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.relation.fatal())
            .map(|r| r.rel_err)
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, threshold: f64) -> bool {
        self.worst_rel_err() < threshold
    }

    pub fn skipped(&self) -> Vec<Relation> {
        Relation::ALL
            .iter()
            .copied()
            .filter(|r| !self.rows.iter().any(|row| row.relation == *r))
            .collect()
    }

    /// Human-readable block, one line per relation and a closing verdict.
    pub fn summary(&self, threshold: f64) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "offset theta = {:.6} deg, theta* = {} ({:?})",
            self.spec.theta().to_degrees(),
            self.spec.theta_star(),
            self.spec.kind()
        );
        let summaries = self.summaries();
        for s in &summaries {
            let verdict = if s.worst_rel < threshold {
                "pass"
            } else if s.relation.fatal() {
                "FAIL"
            } else {
                "mismatch (non-fatal)"
            };
            let _ = writeln!(
                out,
                "  {:<28} rows {:>4}  worst rel {:.3e} at s = {:.6}  {}",
                s.relation.id(),
                s.rows,
                s.worst_rel,
                s.worst_s,
                verdict
            );
        }
        for r in self.skipped() {
            let _ = writeln!(
                out,
                "  {:<28} not applicable (base is not developable)",
                r.id()
            );
        }
        let _ = writeln!(
            out,
            "  striction deviation {:.3e}",
            self.striction_deviation
        );
        let failing = summaries
            .iter()
            .filter(|s| s.relation.fatal() && s.worst_rel >= threshold)
            .count();
        if failing == 0 {
            let _ = write!(out, "all {} relations pass", summaries.len());
            if summaries.len() < Relation::ALL.len() {
                let _ = write!(
                    out,
                    " ({} not applicable)",
                    Relation::ALL.len() - summaries.len()
                );
            }
            out.push('\n');
        } else {
            let _ = writeln!(out, "{failing} of {} relations fail", summaries.len());
        }
        out
    }

    /// CSV with columns `relation_id, s, lhs, rhs, abs_err, rel_err`.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["relation_id", "s", "lhs", "rhs", "abs_err", "rel_err"])?;
        for r in &self.rows {
            w.write_record([
                r.relation_id(),
                r.s.to_string(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.abs_err.to_string(),
                r.rel_err.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn dual_rows(relation: Relation, s: f64, lhs: DualScalar, rhs: DualScalar) -> [ReportRow; 2] {
    [
        ReportRow::new(relation, "real", s, lhs.real, rhs.real),
        ReportRow::new(relation, "dual", s, lhs.dual, rhs.dual),
    ]
}

/// Builds the offset of `base` and evaluates every relation on `sample_count`
/// base rulings spread evenly in arc length, paired with their offset partners.
pub fn full_report(
    base: &RuledSurface,
    spec: &OffsetSpec,
    sample_count: usize,
) -> Result<OffsetReport> {
    let offset = make_offset(base, spec)?;
    let tol = base.developability_tolerance()?;
    let developable = base.is_developable(tol, sample_count.max(2))?.developable;
    let (sin, cos) = spec.theta().sin_cos();
    let th = spec.theta_star();
    let (u_min, _) = base.u_range();

    let samples: Vec<(f64, f64)> = base
        .sample_parameters(sample_count)
        .into_iter()
        .map(|s| Ok((s, base.u_of_s(s)?)))
        .collect::<Result<_>>()?;

    // Integrals panel by panel between consecutive samples, then accumulated.
    let panels: Vec<(BaseIntegrals, f64)> = samples
        .par_iter()
        .enumerate()
        .map(|(i, &(_, u))| {
            let prev = if i == 0 { u_min } else { samples[i - 1].1 };
            Ok((
                BaseIntegrals::over(base, prev, u)?,
                offset.integrate_over_u(prev, u, |st| st.dist_param)?,
            ))
        })
        .collect::<Result<_>>()?;
    let mut running = Vec::with_capacity(panels.len());
    let mut acc = (BaseIntegrals::default(), 0.0);
    for (p, d) in &panels {
        acc = (acc.0.add(p), acc.1 + d);
        running.push(acc);
    }

    let per_sample: Vec<Vec<ReportRow>> = samples
        .par_iter()
        .zip(running.par_iter())
        .map(|(&(s, u), (integrals, dual_length))| {
            let st = base.frame_at_u(u)?;
            let st1 = offset.frame_at_u(u)?;
            let pred = invariant_relations(&st, spec)?;
            let mut rows = Vec::with_capacity(20);

            let (t, t1) = (st.dual_t(), st1.dual_t());
            rows.push(ReportRow::new(
                Relation::CommonPerpendicular,
                "tangent",
                s,
                (t.real - t1.real).norm(),
                0.0,
            ));
            rows.push(ReportRow::new(
                Relation::CommonPerpendicular,
                "moment",
                s,
                (t.dual - t1.dual).norm(),
                0.0,
            ));

            let ratio = offset.speed(u)? / base.speed(u)?;
            let measured = DualScalar::new(ratio, ratio * (st1.dist_param - st.dist_param));
            rows.extend(dual_rows(
                Relation::DualArcRatio,
                s,
                measured,
                arc_length_ratio(&st, spec),
            ));
            rows.push(ReportRow::new(
                Relation::RealArcRatio,
                "",
                s,
                ratio,
                pred.arc_ratio,
            ));

            let check = integrals.check(s, st1.s, *dual_length, spec);
            rows.push(ReportRow::new(
                Relation::ArcLengthIntegrals,
                "s1",
                s,
                check.s1,
                check.s1_predicted,
            ));
            rows.push(ReportRow::new(
                Relation::ArcLengthIntegrals,
                "dual",
                s,
                check.dual_length,
                check.dual_length_predicted,
            ));
            if developable {
                rows.push(ReportRow::new(
                    Relation::DevelopableIntegral,
                    "",
                    s,
                    check.dual_length,
                    check.developable_criterion,
                ));
            }

            rows.push(ReportRow::new(
                Relation::OffsetDistance,
                "",
                s,
                th,
                offset_distance(&st, spec.theta(), st1.delta),
            ));
            rows.push(ReportRow::new(
                Relation::DistributionParameter,
                "",
                s,
                st1.dist_param,
                pred.dist_param1,
            ));
            if developable {
                rows.push(ReportRow::new(
                    Relation::DevelopableOffsetDistance,
                    "",
                    s,
                    st1.dist_param * pred.arc_ratio,
                    st.delta * sin - th * (sin - st.gamma * cos),
                ));
            }
            rows.push(ReportRow::new(
                Relation::ConicalCurvature,
                "",
                s,
                st1.gamma,
                pred.gamma1,
            ));
            // The recovered angle is only defined modulo π.
            let recovered = offset_angle_from_curvatures(st.gamma, st1.gamma);
            let recovered = recovered - PI * ((recovered - spec.theta()) / PI).round();
            rows.push(ReportRow::new(
                Relation::OffsetAngle,
                "",
                s,
                spec.theta(),
                recovered,
            ));
            rows.extend(dual_rows(
                Relation::DualConicalCurvature,
                s,
                st1.gamma_dual,
                pred.gamma_dual1_expanded,
            ));
            rows.extend(dual_rows(
                Relation::DualCurvature,
                s,
                dual_curvature(st1.gamma_dual)?,
                pred.r_bar1,
            ));
            rows.extend(dual_rows(
                Relation::DualSphericalRadius,
                s,
                st1.rho_bar.cos(),
                pred.cos_rho_bar1,
            ));
            rows.push(ReportRow::new(
                Relation::SphericalRadius,
                "",
                s,
                st1.rho_bar.real.cos() / st1.rho_bar.real.sin(),
                pred.cot_rho1,
            ));
            Ok(rows)
        })
        .collect::<Result<_>>()?;

    Ok(OffsetReport {
        spec: *spec,
        base_developable: developable,
        rows: per_sample.into_iter().flatten().collect(),
        striction_deviation: striction_deviation(base, &offset, th, sample_count)?,
    })
}
