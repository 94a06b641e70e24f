//! JSON state files and fixed-precision number formatting.
//!
//! Every float written by this module carries 17 significant digits
//! (`{:.16e}`), so files round-trip bit-exactly and are byte-identical across runs.

use std::io;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::deformation::{DeformationKind, DeformationSpec};
use crate::state::{build_sector_state, build_state, evolve, BuildConfig, FCoherentState, StateError, Truncation};

/// `v` with 17 significant digits; non-finite values as `NaN`, `inf`, `-inf`.
pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

struct SignificantDigits<'a>(PrettyFormatter<'a>);

impl Formatter for SignificantDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Pretty-printed JSON with every float at 17 significant digits, newline-terminated.
/// Non-finite floats become `null`.
pub fn to_json_string<S: Serialize + ?Sized>(value: &S) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SignificantDigits(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex<f64>> for ComplexJson {
    fn from(c: Complex<f64>) -> Self {
        Self { re: c.re, im: c.im }
    }
}

impl From<ComplexJson> for Complex<f64> {
    fn from(c: ComplexJson) -> Self {
        Complex::new(c.re, c.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationJson {
    pub n: usize,
    pub tail_bound: f64,
    pub tol: f64,
    pub converged: bool,
    pub last_ratio: f64,
}

/// On-disk form of an f-coherent state.
///
/// `coeffs`, `norm_const` and `truncation` may be omitted together, in which case
/// the state is rebuilt from `alpha` and `spec` (and evolved to `time`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub alpha: ComplexJson,
    pub spec: DeformationSpec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_const: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationJson>,
    #[serde(default)]
    pub time: f64,
}

impl StateFile {
    pub fn from_state(state: &FCoherentState<f64>) -> Self {
        let t = state.truncation();
        Self {
            alpha: state.alpha().into(),
            spec: state.spec().clone(),
            coeffs: Some(state.coeffs().iter().map(|c| [c.re, c.im]).collect()),
            norm_const: Some(state.norm_const()),
            truncation: Some(TruncationJson {
                n: t.n,
                tail_bound: t.tail_bound,
                tol: t.tol,
                converged: t.converged,
                last_ratio: t.last_ratio,
            }),
            time: state.time(),
        }
    }

    /// Validates (or rebuilds) the stored state under `config`.
    pub fn into_state(self, config: &BuildConfig<f64>) -> Result<FCoherentState<f64>, StateError> {
        let alpha: Complex<f64> = self.alpha.into();
        match (self.coeffs, self.norm_const, self.truncation) {
            (Some(coeffs), Some(norm_const), Some(t)) => FCoherentState::from_parts(
                alpha,
                self.spec,
                coeffs.into_iter().map(|[re, im]| Complex::new(re, im)).collect(),
                norm_const,
                Truncation {
                    n: t.n,
                    tail_bound: t.tail_bound,
                    tol: t.tol,
                    converged: t.converged,
                    last_ratio: t.last_ratio,
                },
                self.time,
                config,
            ),
            (None, None, None) => {
                let built = if self.spec.kind() == DeformationKind::ZeroSector {
                    build_sector_state(&self.spec, alpha, config)?
                } else {
                    build_state(&self.spec, alpha, config)?
                };
                if self.time == 0.0 {
                    Ok(built)
                } else {
                    evolve(&built, self.time)
                }
            }
            _ => Err(StateError::InvalidState(
                "coeffs, norm_const and truncation must be given together or not at all".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(-2.0), "-2.0000000000000000e0");
        assert_eq!(format_f64(f64::NAN), "NaN");
        let v = 0.1 + 0.2;
        assert_eq!(format_f64(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn json_floats_are_fixed_width() {
        let s = to_json_string(&serde_json::json!({"a": 0.5, "b": [1.0, 3]})).unwrap();
        assert_eq!(s, "{\n  \"a\": 5.0000000000000000e-1,\n  \"b\": [\n    1.0000000000000000e0,\n    3\n  ]\n}\n");
    }

    #[test]
    fn state_round_trip_is_exact() {
        let cfg = BuildConfig::default();
        let s = build_state(&DeformationSpec::q_deform(0.5).unwrap(), Complex::new(1.0, -0.3), &cfg).unwrap();
        let s = evolve(&s, 0.7).unwrap();
        let text = to_json_string(&StateFile::from_state(&s)).unwrap();
        let back: StateFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_state(&cfg).unwrap(), s);
    }

    #[test]
    fn short_form_is_rebuilt_and_checked() {
        let cfg = BuildConfig::default();
        let f: StateFile =
            serde_json::from_str(r#"{"alpha":{"re":0.5,"im":0.0},"spec":{"kind":"harmonious"}}"#).unwrap();
        let s = f.into_state(&cfg).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        let far: StateFile =
            serde_json::from_str(r#"{"alpha":{"re":0.9999,"im":0.0},"spec":{"kind":"harmonious"}}"#).unwrap();
        assert!(matches!(far.into_state(&cfg), Err(StateError::OutsideConvergenceRadius { .. })));
        let partial: StateFile =
            serde_json::from_str(r#"{"alpha":{"re":0.5,"im":0.0},"spec":{"kind":"identity"},"norm_const":1.0}"#)
                .unwrap();
        assert!(matches!(partial.into_state(&cfg), Err(StateError::InvalidState(_))));
    }
}
