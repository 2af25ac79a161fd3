//! Plain-text model files:
//!
//! ```text
//! nonmarkov-polymodel v1
//! degree 2
//! ordering grlex
//! features s_k0_l1,s_k0_l2,...
//! coefficients 55
//! 1.2345678901234567e-1
//! ...
//! ```

use super::poly::PolyModel;
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "nonmarkov-polymodel";

pub fn serialize_model(model: &PolyModel, feature_names: &[String]) -> Result<String> {
    if feature_names.len() != model.n_inputs {
        return Err(Error::Dimension(format!(
            "{} feature names for a {}-input model",
            feature_names.len(),
            model.n_inputs
        )));
    }
    if let Some(bad) = feature_names.iter().find(|n| n.is_empty() || n.contains([',', '\n', ' '])) {
        return Err(Error::invalid(format!("feature name {bad:?} is not serialisable")));
    }
    let mut out = format!(
        "{MAGIC} v{MODEL_FORMAT_VERSION}\ndegree {}\nordering grlex\nfeatures {}\ncoefficients {}\n",
        model.degree,
        feature_names.join(","),
        model.coefficients.len()
    );
    for c in &model.coefficients {
        out.push_str(&format!("{c:.16e}\n"));
    }
    Ok(out)
}

fn field<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str> {
    let line = line.ok_or_else(|| Error::Parse(format!("model file ends before `{key}`")))?;
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| Error::Parse(format!("expected `{key} ...`, found {line:?}")))
}

/// Parses a model file, returning the model and its feature names.
pub fn parse_model(text: &str) -> Result<(PolyModel, Vec<String>)> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty model file".into()))?;
    let version = header
        .strip_prefix(MAGIC)
        .and_then(|r| r.strip_prefix(" v"))
        .ok_or_else(|| Error::Parse(format!("not a model file: {header:?}")))?;
    if version != MODEL_FORMAT_VERSION.to_string() {
        return Err(Error::Parse(format!("unsupported model format version {version}")));
    }
    let degree: usize = field(lines.next(), "degree")?.parse().map_err(|e| Error::Parse(format!("degree: {e}")))?;
    let ordering = field(lines.next(), "ordering")?;
    if ordering != "grlex" {
        return Err(Error::Parse(format!("unknown monomial ordering {ordering:?}")));
    }
    let names: Vec<String> = field(lines.next(), "features")?.split(',').map(str::to_owned).collect();
    let count: usize =
        field(lines.next(), "coefficients")?.parse().map_err(|e| Error::Parse(format!("coefficients: {e}")))?;
    let coefficients = lines
        .by_ref()
        .take(count)
        .enumerate()
        .map(|(i, l)| l.trim().parse::<f64>().map_err(|e| Error::Parse(format!("coefficient {i}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if coefficients.len() != count {
        return Err(Error::Parse(format!("expected {count} coefficients, found {}", coefficients.len())));
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(Error::Parse("trailing content after coefficients".into()));
    }
    if coefficients.iter().any(|c| !c.is_finite()) {
        return Err(Error::Parse("non-finite coefficient".into()));
    }
    let model = PolyModel::new(degree, names.len(), coefficients).map_err(|e| Error::Parse(e.to_string()))?;
    Ok((model, names))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::poly::monomial_count;

    #[test]
    fn round_trip_is_exact() {
        let n = monomial_count(3, 2);
        let coeffs: Vec<f64> = (0..n).map(|i| (i as f64 * 1.7).sin() / 3.0).collect();
        let model = PolyModel::new(2, 3, coeffs).unwrap();
        let names: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
        let text = serialize_model(&model, &names).unwrap();
        assert!(text.starts_with("nonmarkov-polymodel v1\n"));
        let (back, back_names) = parse_model(&text).unwrap();
        assert_eq!(back, model);
        assert_eq!(back_names, names);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_model("").is_err());
        assert!(parse_model("nonmarkov-polymodel v2\n").is_err());
        let good = serialize_model(&PolyModel::new(1, 1, vec![1.0, 2.0]).unwrap(), &["x".into()]).unwrap();
        assert!(parse_model(&good.replace("grlex", "lex")).is_err());
        assert!(parse_model(&good.replace("coefficients 2", "coefficients 3")).is_err());
        assert!(parse_model(&format!("{good}5.0\n")).is_err());
        assert!(parse_model(&good.replace("degree 1", "degree 2")).is_err());
    }
}
