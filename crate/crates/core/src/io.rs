//! JSON file formats. Every file carries `format_version`; rationals are
//! strings in the `p/q` grammar (integers are also accepted on input).

use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::{KvAlgebra, KvModule, Tensor3};
use crate::cochain::Cochain;
use crate::deform::Jet;
use crate::error::{Error, Result};
use crate::ext::{AlgebraExtension, ModuleExtension};
use crate::graded::{ConnectionlikePair, GradedKvAlgebra};
use crate::linalg::Mat;
use crate::rat::Rat;

pub const FORMAT_VERSION: u32 = 1;

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Input(format!(
            "unsupported format_version {v}, expected {FORMAT_VERSION}"
        )));
    }
    Ok(())
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    #[serde(default = "default_version")]
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    /// `product[i][j][k]` is the coefficient of `e_k` in `e_i e_j`.
    pub product: Tensor3,
}

impl AlgebraFile {
    pub fn from_algebra(a: &KvAlgebra) -> Self {
        AlgebraFile {
            format_version: FORMAT_VERSION,
            name: a.name().map(str::to_string),
            dim: a.dim(),
            product: a.product().clone(),
        }
    }

    /// The algebra, without checking the KV identity.
    pub fn to_algebra(&self) -> Result<KvAlgebra> {
        check_version(self.format_version)?;
        let n = self.dim;
        if self.product.dims() != [n, n, n] {
            return Err(Error::Input(format!("product must be {n} x {n} x {n}")));
        }
        let a = KvAlgebra::new(self.product.clone())?;
        Ok(match &self.name {
            Some(s) => a.named(s.clone()),
            None => a,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleBody {
    pub dim: usize,
    /// `left[i][a][b]`: coefficient of `w_b` in `e_i w_a`.
    pub left: Tensor3,
    /// `right[a][i][b]`: coefficient of `w_b` in `w_a e_i`.
    pub right: Tensor3,
}

impl ModuleBody {
    pub fn from_module(w: &KvModule) -> Self {
        ModuleBody {
            dim: w.dim(),
            left: w.left().clone(),
            right: w.right().clone(),
        }
    }

    pub fn to_module(&self, a: Arc<KvAlgebra>) -> Result<KvModule> {
        let (n, m) = (a.dim(), self.dim);
        if self.left.dims() != [n, m, m] || self.right.dims() != [m, n, m] {
            return Err(Error::Input(format!(
                "module tensors must be {n}x{m}x{m} (left) and {m}x{n}x{m} (right)"
            )));
        }
        KvModule::new(a, self.left.clone(), self.right.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleFile {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub algebra: AlgebraFile,
    #[serde(flatten)]
    pub module: ModuleBody,
}

impl ModuleFile {
    pub fn from_module(w: &KvModule) -> Self {
        ModuleFile {
            format_version: FORMAT_VERSION,
            algebra: AlgebraFile::from_algebra(w.algebra()),
            module: ModuleBody::from_module(w),
        }
    }

    pub fn to_module(&self) -> Result<KvModule> {
        check_version(self.format_version)?;
        let a = Arc::new(self.algebra.to_algebra()?);
        self.module.to_module(a)
    }
}

/// A module file, or an algebra file read as its regular bimodule.
pub fn read_module_or_regular(text: &str) -> Result<KvModule> {
    let v: serde_json::Value = from_json(text)?;
    if v.get("algebra").is_some() {
        from_json::<ModuleFile>(text)?.to_module()
    } else {
        let a = Arc::new(from_json::<AlgebraFile>(text)?.to_algebra()?);
        Ok(a.regular_bimodule())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainFile {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub degree: usize,
    pub arg_dim: usize,
    pub value_dim: usize,
    /// Flattened big-endian over arguments, value index last.
    pub values: Vec<Rat>,
}

impl CochainFile {
    pub fn from_cochain(c: &Cochain) -> Self {
        CochainFile {
            format_version: FORMAT_VERSION,
            degree: c.degree(),
            arg_dim: c.arg_dim(),
            value_dim: c.value_dim(),
            values: c.values().to_vec(),
        }
    }

    pub fn to_cochain(&self) -> Result<Cochain> {
        check_version(self.format_version)?;
        Cochain::from_values(self.arg_dim, self.value_dim, self.degree, self.values.clone())
            .map_err(|e| Error::Input(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetFile {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub base: AlgebraFile,
    pub coefficients: Vec<Tensor3>,
}

impl JetFile {
    pub fn from_jet(j: &Jet) -> Self {
        JetFile {
            format_version: FORMAT_VERSION,
            base: AlgebraFile::from_algebra(j.base()),
            coefficients: j.coefficients().to_vec(),
        }
    }

    pub fn to_jet(&self) -> Result<Jet> {
        check_version(self.format_version)?;
        Jet::new(Arc::new(self.base.to_algebra()?), self.coefficients.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradedFile {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub even: AlgebraFile,
    pub odd: ModuleBody,
}

impl GradedFile {
    pub fn from_graded(g: &GradedKvAlgebra) -> Self {
        GradedFile {
            format_version: FORMAT_VERSION,
            even: AlgebraFile::from_algebra(g.even()),
            odd: ModuleBody::from_module(g.odd()),
        }
    }

    pub fn to_graded(&self) -> Result<GradedKvAlgebra> {
        check_version(self.format_version)?;
        let a = Arc::new(self.even.to_algebra()?);
        GradedKvAlgebra::new(self.odd.to_module(a)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub theta: Tensor3,
    /// `psi[a][w][k]`, read symmetrically.
    pub psi: Tensor3,
}

impl PairFile {
    pub fn from_pair(p: &ConnectionlikePair) -> Self {
        PairFile {
            format_version: FORMAT_VERSION,
            theta: p.theta.clone(),
            psi: p.psi.clone(),
        }
    }

    pub fn to_pair(&self) -> Result<ConnectionlikePair> {
        check_version(self.format_version)?;
        Ok(ConnectionlikePair {
            theta: self.theta.clone(),
            psi: self.psi.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleExtensionFile {
    pub format_version: u32,
    pub kernel: ModuleBody,
    pub quotient: ModuleBody,
    pub total: ModuleBody,
    pub algebra: AlgebraFile,
    pub injection: Mat,
    pub projection: Mat,
    pub section: Mat,
}

impl ModuleExtensionFile {
    pub fn from_extension(e: &ModuleExtension) -> Self {
        ModuleExtensionFile {
            format_version: FORMAT_VERSION,
            kernel: ModuleBody::from_module(&e.kernel),
            quotient: ModuleBody::from_module(&e.quotient),
            total: ModuleBody::from_module(&e.total),
            algebra: AlgebraFile::from_algebra(e.total.algebra()),
            injection: e.injection(),
            projection: e.projection(),
            section: e.canonical_section(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlgebraExtensionFile {
    pub format_version: u32,
    pub base: AlgebraFile,
    pub kernel: ModuleBody,
    pub total: AlgebraFile,
    pub projection: Mat,
    pub section: Mat,
}

impl AlgebraExtensionFile {
    pub fn from_extension(e: &AlgebraExtension) -> Self {
        AlgebraExtensionFile {
            format_version: FORMAT_VERSION,
            base: AlgebraFile::from_algebra(e.base()),
            kernel: ModuleBody::from_module(&e.kernel),
            total: AlgebraFile::from_algebra(&e.total),
            projection: e.projection(),
            section: e.canonical_section(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rat::r;

    #[test]
    fn algebra_round_trip() {
        for name in fixtures::NAMES {
            let a = fixtures::by_name(name).unwrap();
            let text = to_json(&AlgebraFile::from_algebra(&a));
            let back = from_json::<AlgebraFile>(&text).unwrap().to_algebra().unwrap();
            assert_eq!(back, a);
        }
    }

    #[test]
    fn hand_written_integers() {
        let text = r#"{"dim": 2, "product": [[[0,0],[0,1]],[[0,0],[0,0]]]}"#;
        let a = from_json::<AlgebraFile>(text).unwrap().to_algebra().unwrap();
        assert_eq!(a.product(), fixtures::aff().product());
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(from_json::<AlgebraFile>("{"), Err(Error::Input(_))));
        let bad = r#"{"dim": 2, "product": [[[0,0],[0,1]]]}"#;
        assert!(from_json::<AlgebraFile>(bad).unwrap().to_algebra().is_err());
        let v2 = r#"{"format_version": 2, "dim": 1, "product": [[["1"]]]}"#;
        assert!(from_json::<AlgebraFile>(v2).unwrap().to_algebra().is_err());
        let frac = r#"{"dim": 1, "product": [[["1/0"]]]}"#;
        assert!(from_json::<AlgebraFile>(frac).is_err());
    }

    #[test]
    fn module_and_cochain_round_trip() {
        let w = fixtures::poly_module();
        let text = to_json(&ModuleFile::from_module(&w));
        assert_eq!(read_module_or_regular(&text).unwrap(), w);
        let c = Cochain::from_values(2, 1, 1, vec![r(1), Rat::new(-3, 4)]).unwrap();
        let text = to_json(&CochainFile::from_cochain(&c));
        assert!(text.contains("\"-3/4\""));
        assert_eq!(from_json::<CochainFile>(&text).unwrap().to_cochain().unwrap(), c);
        let a = Arc::new(fixtures::aff());
        let aff_text = to_json(&AlgebraFile::from_algebra(&a));
        assert_eq!(read_module_or_regular(&aff_text).unwrap(), a.regular_bimodule());
    }

    #[test]
    fn graded_round_trip() {
        let (g, pair) = crate::graded::fixture();
        let text = to_json(&GradedFile::from_graded(&g));
        assert_eq!(from_json::<GradedFile>(&text).unwrap().to_graded().unwrap(), g);
        let text = to_json(&PairFile::from_pair(&pair));
        assert_eq!(from_json::<PairFile>(&text).unwrap().to_pair().unwrap(), pair);
    }
}
