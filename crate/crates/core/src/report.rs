//! Machine- and human-readable reports.
//!
//! Reports are deterministic: a fixed sweep order, fixed candidate order
//! and a float writer that always emits 17 significant digits make equal
//! inputs produce byte-identical output.

use crate::bonnet::{CandidateReport, CandidateStatus, ConstancyReport};
use crate::frame::FrameResiduals;
use crate::parallel::SharedQuantities;
use serde::Serialize;
use serde_json::ser::Formatter;
use std::io;

pub const SCHEMA: &str = "relgeo4/1";

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceInfo {
    pub name: String,
    pub normalization: String,
    pub orientation: f64,
    pub domain: [[f64; 2]; 3],
}

#[derive(Clone, Debug, Serialize)]
pub struct StarPointRecord {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "H2")]
    pub h2: f64,
    #[serde(rename = "K")]
    pub k: f64,
    /// max |closed-form - recompute| over the three starred functions
    pub path_discrepancy: f64,
    /// max |closed-form - linear-solve| over the operator components
    pub operator_discrepancy: f64,
    pub peterson_residual: f64,
    pub shared: SharedQuantities,
    /// drift of (H2^2 - K H)/K^2 across the offset
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariant_drift: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointRecord {
    pub point: [f64; 3],
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "H2")]
    pub h2: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub kappas: Option<[f64; 3]>,
    pub radii: [Option<f64>; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<FrameResiduals>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub star: Option<StarPointRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub constancy: Vec<ConstancyReport>,
    /// Grid maxima of named residuals.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub residual_max: Vec<NamedValue>,
    /// Named verification checks (verify command).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub surface: SurfaceInfo,
    pub grid: [usize; 3],
    pub points: Vec<PointRecord>,
    pub summary: Summary,
    pub candidates: Vec<CandidateReport>,
}

/// Pretty JSON with every float rendered at 17 significant digits.
struct SciFormatter {
    indent: usize,
    has_value: bool,
}

impl SciFormatter {
    fn new() -> Self {
        Self {
            indent: 0,
            has_value: false,
        }
    }

    fn newline<W: ?Sized + io::Write>(&self, writer: &mut W) -> io::Result<()> {
        writer.write_all(b"\n")?;
        for _ in 0..self.indent {
            writer.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        writer.write_all(b"[")
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(writer)?;
        }
        writer.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        if !first {
            writer.write_all(b",")?;
        }
        self.newline(writer)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, _writer: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        writer.write_all(b"{")
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(writer)?;
        }
        writer.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        if !first {
            writer.write_all(b",")?;
        }
        self.newline(writer)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        writer.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, _writer: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter::new());
        self.serialize(&mut ser).expect("report serialization");
        out.push(b'\n');
        String::from_utf8(out).expect("json is utf-8")
    }

    /// Aligned-column text rendering.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let push = |s: &mut String, line: String| {
            s.push_str(&line);
            s.push('\n');
        };
        push(
            &mut s,
            format!(
                "surface: {} (normalization {}, orientation {:+})",
                self.surface.name, self.surface.normalization, self.surface.orientation
            ),
        );
        push(
            &mut s,
            format!(
                "grid: {}x{}x{} ({} points)",
                self.grid[0],
                self.grid[1],
                self.grid[2],
                self.points.len()
            ),
        );
        if let Some(mu) = self.summary.mu {
            push(&mut s, format!("relative distance mu = {mu:.12}"));
        }
        if let Some(note) = &self.summary.note {
            push(&mut s, format!("note: {note}"));
        }
        if !self.summary.constancy.is_empty() {
            push(&mut s, "\nconstancy".to_string());
            for c in &self.summary.constancy {
                push(
                    &mut s,
                    format!(
                        "  {:<6} mean {:>24.16e}  spread {:>10.3e}  constant: {}",
                        c.field,
                        c.mean,
                        c.relative_spread,
                        if c.verdict { "yes" } else { "no" }
                    ),
                );
            }
        }
        if !self.summary.residual_max.is_empty() {
            push(&mut s, "\nresidual maxima".to_string());
            for r in &self.summary.residual_max {
                push(&mut s, format!("  {:<24} {:>10.3e}", r.name, r.value));
            }
        }
        if !self.summary.checks.is_empty() {
            push(&mut s, "\nchecks".to_string());
            for c in &self.summary.checks {
                push(
                    &mut s,
                    format!(
                        "  [{}] {:<28} residual {:>10.3e}  threshold {:>8.1e}",
                        if c.pass { "PASS" } else { "FAIL" },
                        c.name,
                        c.residual,
                        c.threshold
                    ),
                );
            }
        }
        if !self.candidates.is_empty() {
            push(&mut s, "\ncandidates".to_string());
            for c in &self.candidates {
                let label = format!("{:?}", c.proposition);
                match (&c.candidate, &c.status) {
                    (
                        Some(cand),
                        CandidateStatus::Verified {
                            constancy,
                            predicted_vs_measured,
                            verdict,
                        },
                    ) => {
                        push(
                            &mut s,
                            format!(
                                "  {:<16} mu {:>12.6}  predicted {:?}* = {:<12.6}  measured {:<12.6}  |dev| {:>9.2e}  [{}]",
                                label,
                                cand.mu,
                                cand.predicted.field,
                                cand.predicted.value,
                                constancy.mean,
                                predicted_vs_measured,
                                if *verdict { "VERIFIED" } else { "MISMATCH" }
                            ),
                        );
                    }
                    (Some(cand), CandidateStatus::OffsetSingular { min_abs_a }) => {
                        push(
                            &mut s,
                            format!(
                                "  {:<16} mu {:>12.6}  offset singular: min |A| = {min_abs_a:.3e}",
                                label, cand.mu
                            ),
                        );
                    }
                    (Some(cand), CandidateStatus::Formula) => {
                        push(
                            &mut s,
                            format!(
                                "  {:<16} mu {:>12.6}  predicted {:?}* = {:<12.6}  |P(mu)| = {:.3e}",
                                label,
                                cand.mu,
                                cand.predicted.field,
                                cand.predicted.value,
                                cand.root_residual
                            ),
                        );
                    }
                    (Some(cand), CandidateStatus::Failed { reason }) => {
                        push(
                            &mut s,
                            format!("  {:<16} mu {:>12.6}  failed: {reason}", label, cand.mu),
                        );
                    }
                    (_, CandidateStatus::NotApplicable { reason }) => {
                        push(&mut s, format!("  {label:<16} not applicable: {reason}"));
                    }
                    _ => {}
                }
            }
        }
        if !self.points.is_empty() {
            push(&mut s, "\npoints".to_string());
            push(
                &mut s,
                format!(
                    "  {:>9} {:>9} {:>9} {:>14} {:>14} {:>14}",
                    "u1", "u2", "u3", "H", "H2", "K"
                ),
            );
            for p in &self.points {
                push(
                    &mut s,
                    format!(
                        "  {:>9.4} {:>9.4} {:>9.4} {:>14.6e} {:>14.6e} {:>14.6e}",
                        p.point[0], p.point[1], p.point[2], p.h, p.h2, p.k
                    ),
                );
            }
        }
        if let Some(verdict) = self.summary.verdict {
            push(
                &mut s,
                format!("\nverdict: {}", if verdict { "PASS" } else { "FAIL" }),
            );
        }
        s
    }

    /// Per-point table as CSV; optional fields render as empty cells.
    pub fn points_csv(&self) -> String {
        let mut s = String::from(
            "u1,u2,u3,H,H2,K,kappa1,kappa2,kappa3,R1,R2,R3,weingarten,b_symmetry,\
             star_A,star_H,star_H2,star_K,path_discrepancy,peterson\n",
        );
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        for p in &self.points {
            let kappas = p.kappas.map_or([None; 3], |k| k.map(Some));
            s.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                p.point[0],
                p.point[1],
                p.point[2],
                p.h,
                p.h2,
                p.k,
                opt(kappas[0]),
                opt(kappas[1]),
                opt(kappas[2]),
                opt(p.radii[0]),
                opt(p.radii[1]),
                opt(p.radii[2]),
                opt(p.residuals.map(|r| r.weingarten)),
                opt(p.residuals.map(|r| r.b_symmetry)),
                opt(p.star.as_ref().map(|s| s.a)),
                opt(p.star.as_ref().map(|s| s.h)),
                opt(p.star.as_ref().map(|s| s.h2)),
                opt(p.star.as_ref().map(|s| s.k)),
                opt(p.star.as_ref().map(|s| s.path_discrepancy)),
                opt(p.star.as_ref().map(|s| s.peterson_residual)),
            ));
        }
        s
    }
}
