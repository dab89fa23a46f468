//! Surface definition files and grid sampling.
//!
//! A `.surf` file is a minimal line-oriented `key = value` format with two
//! bracketed sections:
//!
//! ```text
//! [surface]
//! name = "sphere-r2"
//! x1 = "2*cos(u1)*cos(u2)*cos(u3)"
//! x2 = "2*sin(u1)*cos(u2)*cos(u3)"
//! x3 = "2*sin(u2)*cos(u3)"
//! x4 = "2*sin(u3)"
//! u1 = [0.2, 1.2]
//! u2 = [-0.5, 0.5]
//! u3 = [-0.5, 0.5]
//! grid = 7x7x7              # optional, defaults to 7x7x7
//! [normalization]
//! mode = "euclidean"        # or "equiaffine" or "custom" with q = "<expr>"
//! orientation = "auto"      # or 1 / -1
//! ```
//!
//! Grid points sit strictly inside the domain box, offset half a step from
//! each boundary, which keeps chart degeneracies (e.g. spherical poles) out
//! of the sweep.

use crate::expr::{self, Expression};
use crate::frame::{self, CurvatureSet, FrameError, NormalizationMode, RelativeFrame};
use std::fmt;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("validation failed at grid point {point:?}: {source}")]
    Validation { point: [f64; 3], source: FrameError },
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Orientation {
    /// Pick the sign that makes the second fundamental form positive
    /// definite at the domain-box center.
    Auto,
    Fixed(f64),
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Orientation::Auto => write!(f, "auto"),
            Orientation::Fixed(s) => write!(f, "{s:+.0}"),
        }
    }
}

/// Parsed and (after [`SurfaceSpec::validate`]) checked surface definition.
#[derive(Clone, Debug)]
pub struct SurfaceSpec {
    pub name: String,
    pub x: [Expression; 4],
    pub domain: [[f64; 2]; 3],
    pub normalization: NormalizationMode,
    pub orientation: Orientation,
    pub grid: [usize; 3],
}

impl SurfaceSpec {
    pub fn load(path: &Path) -> Result<SurfaceSpec, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let spec = Self::parse(&text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Parse without running the grid validation.
    pub fn parse(text: &str) -> Result<SurfaceSpec, SpecError> {
        let mut builder = Builder::default();
        let mut section = Section::None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw);
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| SpecError::Format {
                    line: line_no,
                    msg: "unterminated section header".into(),
                })?;
                section = match name.trim() {
                    "surface" => Section::Surface,
                    "normalization" => Section::Normalization,
                    other => {
                        return Err(SpecError::Format {
                            line: line_no,
                            msg: format!("unknown section `[{other}]`"),
                        })
                    }
                };
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| SpecError::Format {
                line: line_no,
                msg: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            let value = value.trim();
            builder.set(section, key, value, line_no)?;
        }
        builder.finish()
    }

    pub fn center(&self) -> [f64; 3] {
        [
            0.5 * (self.domain[0][0] + self.domain[0][1]),
            0.5 * (self.domain[1][0] + self.domain[1][1]),
            0.5 * (self.domain[2][0] + self.domain[2][1]),
        ]
    }

    /// Interior sample points in fixed lexicographic order (u1 slowest).
    pub fn grid_points(&self, grid: [usize; 3]) -> Vec<[f64; 3]> {
        let mut points = Vec::with_capacity(grid[0] * grid[1] * grid[2]);
        let coords: Vec<Vec<f64>> = (0..3)
            .map(|axis| {
                let [lo, hi] = self.domain[axis];
                let n = grid[axis];
                let step = (hi - lo) / n as f64;
                (0..n).map(|i| lo + step * (i as f64 + 0.5)).collect()
            })
            .collect();
        for &a in &coords[0] {
            for &b in &coords[1] {
                for &c in &coords[2] {
                    points.push([a, b, c]);
                }
            }
        }
        points
    }

    /// The concrete normal sign for this surface.
    pub fn resolve_orientation(&self) -> Result<f64, FrameError> {
        match self.orientation {
            Orientation::Fixed(s) => Ok(s),
            Orientation::Auto => frame::auto_orientation(&self.x, self.center()),
        }
    }

    pub fn frame_at(
        &self,
        orientation: f64,
        point: [f64; 3],
    ) -> Result<(RelativeFrame, CurvatureSet), FrameError> {
        frame::build_frame(&self.x, &self.normalization, orientation, point)
    }

    /// Build a frame at every grid point; the load-time immersion, Gauss
    /// curvature and support checks all live inside the frame pipeline.
    pub fn validate(&self) -> Result<(), SpecError> {
        self.validate_on(self.grid)
    }

    pub fn validate_on(&self, grid: [usize; 3]) -> Result<(), SpecError> {
        let orientation = self
            .resolve_orientation()
            .map_err(|source| SpecError::Validation {
                point: self.center(),
                source,
            })?;
        for point in self.grid_points(grid) {
            self.frame_at(orientation, point)
                .map_err(|source| SpecError::Validation { point, source })?;
        }
        Ok(())
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    for (pos, ch) in line.char_indices() {
        match ch {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..pos],
            _ => {}
        }
    }
    line
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Surface,
    Normalization,
}

#[derive(Default)]
struct Builder {
    name: Option<String>,
    x: [Option<(Expression, usize)>; 4],
    domain: [Option<[f64; 2]>; 3],
    grid: Option<[usize; 3]>,
    mode: Option<(String, usize)>,
    q: Option<(String, usize)>,
    orientation: Option<Orientation>,
}

impl Builder {
    fn set(
        &mut self,
        section: Section,
        key: &str,
        value: &str,
        line: usize,
    ) -> Result<(), SpecError> {
        let fail = |msg: String| Err(SpecError::Format { line, msg });
        match (section, key) {
            (Section::Surface, "name") => self.name = Some(parse_quoted(value, key, line)?),
            (Section::Surface, "x1" | "x2" | "x3" | "x4") => {
                let slot = key[1..].parse::<usize>().unwrap() - 1;
                let source = parse_quoted(value, key, line)?;
                let expr = expr::parse(&source).map_err(|e| SpecError::Format {
                    line,
                    msg: format!("key `{key}`: {e}"),
                })?;
                self.x[slot] = Some((expr, line));
            }
            (Section::Surface, "u1" | "u2" | "u3") => {
                let slot = key[1..].parse::<usize>().unwrap() - 1;
                self.domain[slot] = Some(parse_interval(value, key, line)?);
            }
            (Section::Surface, "grid") => {
                let text = value.trim_matches('"');
                let parts: Vec<&str> = text.split('x').collect();
                let dims: Option<Vec<usize>> = parts
                    .iter()
                    .map(|p| p.trim().parse::<usize>().ok())
                    .collect();
                match dims.as_deref() {
                    Some([a, b, c]) if *a > 0 && *b > 0 && *c > 0 => self.grid = Some([*a, *b, *c]),
                    _ => return fail(format!("key `grid`: expected AxBxC, got `{value}`")),
                }
            }
            (Section::Normalization, "mode") => {
                self.mode = Some((parse_quoted(value, key, line)?, line))
            }
            (Section::Normalization, "q") => self.q = Some((parse_quoted(value, key, line)?, line)),
            (Section::Normalization, "orientation") => {
                let text = value.trim_matches('"');
                self.orientation = Some(match text {
                    "auto" => Orientation::Auto,
                    "1" | "+1" => Orientation::Fixed(1.0),
                    "-1" => Orientation::Fixed(-1.0),
                    other => {
                        return fail(format!(
                            "key `orientation`: expected auto, 1 or -1, got `{other}`"
                        ))
                    }
                });
            }
            (Section::None, _) => return fail(format!("key `{key}` outside of any section")),
            (_, other) => return fail(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    fn finish(self) -> Result<SurfaceSpec, SpecError> {
        let missing = |what: &str| SpecError::Format {
            line: 0,
            msg: format!("missing required key `{what}`"),
        };
        let name = self.name.ok_or_else(|| missing("name"))?;
        let mut x = Vec::with_capacity(4);
        for (i, slot) in self.x.into_iter().enumerate() {
            x.push(slot.ok_or_else(|| missing(&format!("x{}", i + 1)))?.0);
        }
        let x: [Expression; 4] = x.try_into().unwrap();
        let mut domain = [[0.0; 2]; 3];
        for (i, slot) in self.domain.into_iter().enumerate() {
            domain[i] = slot.ok_or_else(|| missing(&format!("u{}", i + 1)))?;
        }
        let (mode_name, mode_line) = self.mode.ok_or_else(|| missing("mode"))?;
        if mode_name != "custom" {
            if let Some((_, q_line)) = &self.q {
                return Err(SpecError::Format {
                    line: *q_line,
                    msg: "`q` is only meaningful with mode \"custom\"".into(),
                });
            }
        }
        let normalization = match mode_name.as_str() {
            "euclidean" => NormalizationMode::Euclidean,
            "equiaffine" => NormalizationMode::Equiaffine,
            "custom" => {
                let (source, q_line) = self.q.ok_or_else(|| SpecError::Format {
                    line: mode_line,
                    msg: "mode \"custom\" requires a `q` expression".into(),
                })?;
                let expr = expr::parse(&source).map_err(|e| SpecError::Format {
                    line: q_line,
                    msg: format!("key `q`: {e}"),
                })?;
                NormalizationMode::Custom { expr, source }
            }
            other => {
                return Err(SpecError::Format {
                    line: mode_line,
                    msg: format!("unknown normalization mode `{other}`"),
                })
            }
        };
        Ok(SurfaceSpec {
            name,
            x,
            domain,
            normalization,
            orientation: self.orientation.unwrap_or(Orientation::Auto),
            grid: self.grid.unwrap_or([7, 7, 7]),
        })
    }
}

fn parse_quoted(value: &str, key: &str, line: usize) -> Result<String, SpecError> {
    let inner = value
        .strip_prefix('"')
        .and_then(|v| v.strip_suffix('"'))
        .ok_or_else(|| SpecError::Format {
            line,
            msg: format!("key `{key}`: expected a quoted string"),
        })?;
    Ok(inner.to_string())
}

fn parse_interval(value: &str, key: &str, line: usize) -> Result<[f64; 2], SpecError> {
    let fail = || SpecError::Format {
        line,
        msg: format!("key `{key}`: expected an interval [lo, hi]"),
    };
    let inner = value
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .ok_or_else(fail)?;
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != 2 {
        return Err(fail());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| fail())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| fail())?;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(SpecError::Format {
            line,
            msg: format!("key `{key}`: interval must satisfy lo < hi"),
        });
    }
    Ok([lo, hi])
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const SPHERE2: &str = r#"
[surface]
name = "sphere-r2"
x1 = "2*cos(u1)*cos(u2)*cos(u3)"
x2 = "2*sin(u1)*cos(u2)*cos(u3)"
x3 = "2*sin(u2)*cos(u3)"
x4 = "2*sin(u3)"
u1 = [0.2, 1.2]
u2 = [-0.5, 0.5]
u3 = [-0.5, 0.5]
[normalization]
mode = "euclidean"   # the classical case
orientation = "auto"
"#;

    #[test]
    fn reference_file_parses_and_validates() {
        let spec = SurfaceSpec::parse(SPHERE2).unwrap();
        assert_eq!(spec.name, "sphere-r2");
        assert_eq!(spec.grid, [7, 7, 7]);
        assert_eq!(spec.orientation, Orientation::Auto);
        spec.validate_on([3, 3, 3]).unwrap();
        // convex surface: auto resolves to the inward normal, h > 0
        let orientation = spec.resolve_orientation().unwrap();
        let (frame, curv) = spec.frame_at(orientation, spec.center()).unwrap();
        assert!(frame.h[0][0] > 0.0);
        assert!((curv.h - 0.5).abs() < 1e-10);
    }

    #[test]
    fn grid_points_are_interior() {
        let spec = SurfaceSpec::parse(SPHERE2).unwrap();
        let pts = spec.grid_points([4, 5, 6]);
        assert_eq!(pts.len(), 4 * 5 * 6);
        for p in &pts {
            for axis in 0..3 {
                assert!(p[axis] > spec.domain[axis][0]);
                assert!(p[axis] < spec.domain[axis][1]);
            }
        }
        // half-step offset on the first axis: lo + step/2
        assert!((pts[0][0] - (0.2 + 0.125)).abs() < 1e-12);
    }

    #[test]
    fn zero_support_fails_validation() {
        let text = SPHERE2.replace(
            "mode = \"euclidean\"   # the classical case",
            "mode = \"custom\"\nq = \"0\"",
        );
        let spec = SurfaceSpec::parse(&text).unwrap();
        match spec.validate_on([2, 2, 2]) {
            Err(SpecError::Validation {
                source: FrameError::ZeroSupport { .. },
                ..
            }) => {}
            other => panic!("expected ZeroSupport validation error, got {other:?}"),
        }
    }

    #[test]
    fn flat_patch_fails_validation() {
        let text = r#"
[surface]
name = "flat"
x1 = "u1"
x2 = "u2"
x3 = "u3"
x4 = "0"
u1 = [-1, 1]
u2 = [-1, 1]
u3 = [-1, 1]
[normalization]
mode = "euclidean"
orientation = "1"
"#;
        let spec = SurfaceSpec::parse(text).unwrap();
        match spec.validate_on([2, 2, 2]) {
            Err(SpecError::Validation {
                source: FrameError::VanishingGaussCurvature { .. },
                ..
            }) => {}
            other => panic!("expected VanishingGaussCurvature, got {other:?}"),
        }
    }

    #[test]
    fn format_errors_carry_line_numbers() {
        let text = "[surface]\nname = \"x\"\nbogus = 3\n";
        match SurfaceSpec::parse(text) {
            Err(SpecError::Format { line, msg }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("bogus"));
            }
            other => panic!("expected Format error, got {other:?}"),
        }
        // malformed expression points at its key
        let text = "[surface]\nname = \"x\"\nx1 = \"u1 +\"\n";
        match SurfaceSpec::parse(text) {
            Err(SpecError::Format { line, msg }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("x1"));
            }
            other => panic!("expected Format error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_variable_in_expression_is_reported() {
        let text = SPHERE2.replace("2*sin(u3)", "2*sin(u4)");
        assert!(matches!(
            SurfaceSpec::parse(&text),
            Err(SpecError::Format { .. })
        ));
    }
}
