//! Plain-text file formats: LLR vectors, code specs and CSV output.

use std::fs;
use std::path::Path;

use crate::code_model::PolarCodeSpec;
use crate::harness::{HarnessError, TrialStats, CSV_HEADER};

/// One decimal LLR per line; blank lines are ignored.
pub fn parse_llrs(text: &str, origin: &str) -> Result<Vec<f64>, HarnessError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let v: f64 = l.trim().parse().map_err(|e| HarnessError::Parse {
                path: origin.to_string(),
                line: i + 1,
                msg: format!("{e}"),
            })?;
            if v.is_nan() {
                return Err(HarnessError::Parse { path: origin.to_string(), line: i + 1, msg: "NaN LLR".into() });
            }
            Ok(v)
        })
        .collect()
}

pub fn read_llr_file(path: &Path) -> Result<Vec<f64>, HarnessError> {
    parse_llrs(&fs::read_to_string(path)?, &path.display().to_string())
}

pub fn write_llr_file(path: &Path, llrs: &[f64]) -> Result<(), HarnessError> {
    let mut s = String::with_capacity(llrs.len() * 12);
    for v in llrs {
        s.push_str(&format!("{v}\n"));
    }
    fs::write(path, s)?;
    Ok(())
}

pub fn read_spec_file(path: &Path) -> Result<PolarCodeSpec, HarnessError> {
    Ok(PolarCodeSpec::from_text(&fs::read_to_string(path)?)?)
}

pub fn write_spec_file(path: &Path, spec: &PolarCodeSpec) -> Result<(), HarnessError> {
    fs::write(path, spec.to_text())?;
    Ok(())
}

/// Header plus one row per point.
pub fn write_csv(path: &Path, rows: &[TrialStats]) -> Result<(), HarnessError> {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn llr_round_trip() {
        let dir = std::env::temp_dir().join(format!("polar-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("x.llr");
        let v = vec![1.5, -0.25, 60.0, 1e-3, -7.123456789];
        write_llr_file(&p, &v).unwrap();
        assert_eq!(read_llr_file(&p).unwrap(), v);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn llr_parse_errors_name_the_line() {
        let err = parse_llrs("1.0\n\nabc\n", "mem").unwrap_err();
        match err {
            HarnessError::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
    }
}
