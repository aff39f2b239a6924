//! Output records and their JSON and CSV renderings.

use std::io::Write;

use heunc::{Complex64, HeunParams};
use serde::Serialize;

use crate::CliError;

/// A complex number as it appears in JSON output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        // adding +0.0 turns -0.0 into 0.0
        Self {
            re: z.re + 0.0,
            im: z.im + 0.0,
        }
    }
}

pub fn cxs(zs: &[Complex64]) -> Vec<Cx> {
    zs.iter().map(|&z| z.into()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamsOut {
    pub alpha: Cx,
    pub beta: Cx,
    pub gamma: Cx,
    pub delta: Cx,
    pub eta: Cx,
}

impl From<&HeunParams> for ParamsOut {
    fn from(p: &HeunParams) -> Self {
        Self {
            alpha: p.alpha().into(),
            beta: p.beta().into(),
            gamma: p.gamma().into(),
            delta: p.delta().into(),
            eta: p.eta().into(),
        }
    }
}

/// Every command prints exactly one of these.
#[derive(Debug, Serialize)]
pub struct OutputRecord<I, R, D> {
    pub command: &'static str,
    pub inputs: I,
    pub results: R,
    pub diagnostics: D,
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, record: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, record)?;
    writeln!(out)?;
    Ok(())
}

/// 17 significant digits.
pub fn real_field(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<R>(out: &mut dyn Write, header: &[&str], rows: R) -> Result<(), CliError>
where
    R: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_field_has_seventeen_significant_digits() {
        let s = real_field(0.1);
        let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17);
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        assert_eq!(real_field(-1.0), "-1.0000000000000000e0");
    }

    #[test]
    fn negative_zero_is_normalised() {
        let z = Cx::from(Complex64::new(-0.0, -0.0));
        assert!(z.re.is_sign_positive() && z.im.is_sign_positive());
    }

    #[test]
    fn complex_serializes_as_object() {
        let json = serde_json::to_string(&Cx::from(Complex64::new(1.0, -2.0))).unwrap();
        assert_eq!(json, r#"{"re":1.0,"im":-2.0}"#);
    }
}
