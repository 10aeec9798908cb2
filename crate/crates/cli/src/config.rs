//! Parsing of `family:key=val[,key=val]` selectors and complex points.

use std::collections::BTreeMap;

use bergman_dbar::WeightSpec;
use num_complex::Complex64;

use crate::error::{CliError, CliResult};

/// A parsed `--weight` selector.
#[derive(Debug, Clone, PartialEq)]
pub struct Selector {
    pub family: String,
    pub params: BTreeMap<String, f64>,
}

impl Selector {
    pub fn parse(text: &str) -> CliResult<Self> {
        let (family, rest) = text.split_once(':').unwrap_or((text, ""));
        let family = family.trim().to_ascii_lowercase();
        if family.is_empty() {
            return Err(CliError::Parameter(format!(
                "missing weight family in '{text}'"
            )));
        }
        let mut params = BTreeMap::new();
        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::Parameter(format!("expected key=val, got '{pair}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Parameter(format!("'{v}' is not a number in '{pair}'")))?;
            params.insert(k.trim().to_ascii_lowercase(), v);
        }
        Ok(Self { family, params })
    }

    pub fn get(&self, key: &str) -> CliResult<f64> {
        self.params.get(key).copied().ok_or_else(|| {
            CliError::Parameter(format!("weight '{}' needs parameter '{key}'", self.family))
        })
    }

    pub fn get_or(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    fn reject_unknown(&self, known: &[&str]) -> CliResult<()> {
        match self.params.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(CliError::Parameter(format!(
                "unknown parameter '{k}' for weight '{}'",
                self.family
            ))),
            None => Ok(()),
        }
    }

    /// One-variable weights: `disc:alpha=…` or `fock:m=…`.
    pub fn radial_weight(&self) -> CliResult<WeightSpec> {
        match self.family.as_str() {
            "disc" => {
                self.reject_unknown(&["alpha"])?;
                Ok(WeightSpec::disc(self.get("alpha")?)?)
            }
            "fock" => {
                self.reject_unknown(&["m"])?;
                Ok(WeightSpec::fock(self.get("m")?)?)
            }
            other => Err(CliError::Parameter(format!(
                "expected a disc or fock weight, got '{other}'"
            ))),
        }
    }

    /// `ball:alpha=…`.
    pub fn ball_alpha(&self) -> CliResult<f64> {
        if self.family != "ball" {
            return Err(CliError::Parameter(format!(
                "expected a ball weight, got '{}'",
                self.family
            )));
        }
        self.reject_unknown(&["alpha"])?;
        let alpha = self.get("alpha")?;
        if !(alpha >= 0.0) {
            return Err(CliError::Parameter(format!(
                "ball weight requires alpha >= 0, got {alpha}"
            )));
        }
        Ok(alpha)
    }

    /// `power:k=…[,c=…][,dim=…]`, the radial weight `c |z|^k` on `ℂ^dim`.
    pub fn power(&self) -> CliResult<(f64, f64, usize)> {
        if self.family != "power" {
            return Err(CliError::Parameter(format!(
                "expected a power weight, got '{}'",
                self.family
            )));
        }
        self.reject_unknown(&["k", "c", "dim"])?;
        let k = self.get("k")?;
        let c = self.get_or("c", 1.0);
        let dim = self.get_or("dim", 1.0);
        if !(k > 0.0 && c > 0.0) || dim.fract() != 0.0 || !(1.0..=3.0).contains(&dim) {
            return Err(CliError::Parameter(
                "power weight needs k > 0, c > 0 and dim in 1..=3".into(),
            ));
        }
        Ok((k, c, dim as usize))
    }
}

/// `re,im` or a bare real.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| format!("'{s}' is not a number"))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected re,im, got '{text}'")),
    }
}

/// Coefficient file: JSON array of `[re, im]` pairs indexed by degree.
pub fn parse_coefficients(text: &str) -> CliResult<Vec<Complex64>> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| CliError::Input(format!("coefficient file is not JSON: {e}")))?;
    let items = value
        .as_array()
        .ok_or_else(|| CliError::Input("coefficient file must be a JSON array".into()))?;
    items
        .iter()
        .enumerate()
        .map(|(i, item)| match item.as_array().map(Vec::as_slice) {
            Some([re, im]) => match (re.as_f64(), im.as_f64()) {
                (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                _ => Err(CliError::Input(format!(
                    "entry {i} is not a pair of numbers"
                ))),
            },
            _ => Err(CliError::Input(format!(
                "entry {i} must be a [re, im] pair"
            ))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selectors() {
        let s = Selector::parse("fock:m=2").unwrap();
        assert_eq!(s.radial_weight().unwrap().to_string(), "fock:m=2");
        assert!(matches!(
            Selector::parse("disc:alpha=-1").unwrap().radial_weight(),
            Err(CliError::Parameter(_))
        ));
        assert!(Selector::parse("disc:alpha").is_err());
        assert!(Selector::parse("disc:beta=1")
            .unwrap()
            .radial_weight()
            .is_err());
        assert_eq!(
            Selector::parse("power:k=2,dim=2").unwrap().power().unwrap(),
            (2.0, 1.0, 2)
        );
        assert_eq!(
            Selector::parse("ball:alpha=1")
                .unwrap()
                .ball_alpha()
                .unwrap(),
            1.0
        );
    }

    #[test]
    fn coefficients() {
        assert_eq!(
            parse_coefficients("[[1, 0], [0.5, -2]]").unwrap()[1],
            Complex64::new(0.5, -2.0)
        );
        assert!(matches!(
            parse_coefficients("[1, 2]"),
            Err(CliError::Input(_))
        ));
        assert!(matches!(parse_coefficients("{"), Err(CliError::Input(_))));
        assert_eq!(parse_complex("1.5,-2").unwrap(), Complex64::new(1.5, -2.0));
    }
}
