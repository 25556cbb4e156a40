//! JSON formats. Indices are 1-based on the wire and 0-based in memory;
//! rationals are written as `"p/q"` strings and read from strings or plain
//! JSON numbers.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::NambuSystem;
use crate::error::{Error, Result};
use crate::multivec::MultiVector;
use crate::njacobi::JacobiOp;
use crate::nlie::NLieStructure;
use crate::poly::{format_rational, parse_rational, Poly, Rational};

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
enum RatRepr {
    Text(String),
    Int(i64),
    Float(f64),
}

impl RatRepr {
    fn to_rational(&self, at: &str) -> Result<Rational> {
        let parsed = match self {
            RatRepr::Text(s) => parse_rational(s),
            RatRepr::Int(n) => parse_rational(&n.to_string()),
            RatRepr::Float(x) => parse_rational(&x.to_string()),
        };
        parsed.map_err(|e| Error::Parse(format!("{at}: {e}")))
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    coef: RatRepr,
    exps: Vec<u32>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct ComponentDoc {
    indices: Vec<usize>,
    poly: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct MultiVectorDoc {
    num_vars: usize,
    degree: usize,
    components: Vec<ComponentDoc>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct ConstantDoc {
    indices: Vec<usize>,
    value: Vec<RatRepr>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct NLieDoc {
    dim: usize,
    arity: usize,
    constants: Vec<ConstantDoc>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct PairDoc {
    nabla: MultiVectorDoc,
    #[serde(rename = "box")]
    boxv: MultiVectorDoc,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct SystemDoc {
    tensor: MultiVectorDoc,
    hamiltonians: Vec<Vec<TermDoc>>,
}

fn parse_doc<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
}

fn zero_based(indices: &[usize], bound: usize, at: &str) -> Result<Vec<usize>> {
    indices
        .iter()
        .map(|&i| {
            if i == 0 || i > bound {
                Err(Error::Parse(format!("{at}: index {i} outside 1..={bound}")))
            } else {
                Ok(i - 1)
            }
        })
        .collect()
}

fn poly_doc(p: &Poly) -> Vec<TermDoc> {
    p.terms().map(|(e, c)| TermDoc { coef: RatRepr::Text(format_rational(c)), exps: e.clone() }).collect()
}

fn poly_from_doc(terms: &[TermDoc], num_vars: usize, at: &str) -> Result<Poly> {
    let mut parsed = Vec::with_capacity(terms.len());
    for (k, t) in terms.iter().enumerate() {
        let here = format!("{at}[{k}]");
        if t.exps.len() != num_vars {
            return Err(Error::Parse(format!("{here}.exps: expected {num_vars} exponents, got {}", t.exps.len())));
        }
        parsed.push((t.exps.clone(), t.coef.to_rational(&format!("{here}.coef"))?));
    }
    // repeated exponent vectors are summed
    parsed.into_iter().try_fold(Poly::zero(num_vars), |acc, (e, c)| {
        acc.checked_add(&Poly::monomial(num_vars, e, c)).map_err(|e| Error::Parse(format!("{at}: {e}")))
    })
}

fn mv_doc(v: &MultiVector) -> MultiVectorDoc {
    MultiVectorDoc {
        num_vars: v.num_vars(),
        degree: v.degree(),
        components: v
            .components()
            .map(|(idx, p)| ComponentDoc { indices: idx.iter().map(|i| i + 1).collect(), poly: poly_doc(p) })
            .collect(),
    }
}

fn mv_from_doc(doc: &MultiVectorDoc, at: &str) -> Result<MultiVector> {
    let mut v = MultiVector::zero(doc.num_vars, doc.degree);
    for (k, c) in doc.components.iter().enumerate() {
        let here = format!("{at}components[{k}]");
        if c.indices.len() != doc.degree {
            return Err(Error::Parse(format!("{here}.indices: expected {} indices", doc.degree)));
        }
        let idx = zero_based(&c.indices, doc.num_vars, &format!("{here}.indices"))?;
        let p = poly_from_doc(&c.poly, doc.num_vars, &format!("{here}.poly"))?;
        let blade = MultiVector::from_components(doc.num_vars, doc.degree, [(idx, p)])
            .map_err(|e| Error::Parse(format!("{here}: {e}")))?;
        v = v.checked_add(&blade)?;
    }
    Ok(v)
}

pub fn poly_to_value(p: &Poly) -> Value {
    serde_json::to_value(poly_doc(p)).expect("serializable")
}

pub fn poly_from_value(v: &Value, num_vars: usize) -> Result<Poly> {
    let terms: Vec<TermDoc> = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    poly_from_doc(&terms, num_vars, "poly")
}

pub fn multivector_to_value(v: &MultiVector) -> Value {
    serde_json::to_value(mv_doc(v)).expect("serializable")
}

pub fn multivector_from_str(text: &str) -> Result<MultiVector> {
    mv_from_doc(&parse_doc(text)?, "")
}

pub fn nlie_to_value(p: &NLieStructure) -> Value {
    let doc = NLieDoc {
        dim: p.dim(),
        arity: p.arity(),
        constants: p
            .constants()
            .map(|(idx, val)| ConstantDoc {
                indices: idx.iter().map(|i| i + 1).collect(),
                value: val.iter().map(|c| RatRepr::Text(format_rational(c))).collect(),
            })
            .collect(),
    };
    serde_json::to_value(doc).expect("serializable")
}

pub fn nlie_from_str(text: &str) -> Result<NLieStructure> {
    let doc: NLieDoc = parse_doc(text)?;
    let mut p = NLieStructure::zero(doc.dim, doc.arity);
    for (k, c) in doc.constants.iter().enumerate() {
        let here = format!("constants[{k}]");
        if c.indices.len() != doc.arity {
            return Err(Error::Parse(format!("{here}.indices: expected {} indices", doc.arity)));
        }
        if c.value.len() != doc.dim {
            return Err(Error::Parse(format!("{here}.value: expected {} entries", doc.dim)));
        }
        let idx = zero_based(&c.indices, doc.dim, &format!("{here}.indices"))?;
        let value = c
            .value
            .iter()
            .enumerate()
            .map(|(j, r)| r.to_rational(&format!("{here}.value[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        p.add_constant(&idx, &value).map_err(|e| Error::Parse(format!("{here}: {e}")))?;
    }
    Ok(p)
}

pub fn pair_to_value(op: &JacobiOp) -> Value {
    serde_json::to_value(PairDoc { nabla: mv_doc(op.nabla()), boxv: mv_doc(op.boxv()) }).expect("serializable")
}

pub fn pair_from_str(text: &str) -> Result<JacobiOp> {
    let doc: PairDoc = parse_doc(text)?;
    JacobiOp::new(mv_from_doc(&doc.nabla, "nabla.")?, mv_from_doc(&doc.boxv, "box.")?)
}

pub fn system_to_value(sys: &NambuSystem) -> Value {
    let doc = SystemDoc { tensor: mv_doc(sys.tensor()), hamiltonians: sys.hamiltonians().iter().map(poly_doc).collect() };
    serde_json::to_value(doc).expect("serializable")
}

/// `{tensor: <multivector>, hamiltonians: [<poly>, …]}`.
pub fn system_from_str(text: &str) -> Result<NambuSystem> {
    let doc: SystemDoc = parse_doc(text)?;
    let tensor = mv_from_doc(&doc.tensor, "tensor.")?;
    let hams = doc
        .hamiltonians
        .iter()
        .enumerate()
        .map(|(k, h)| poly_from_doc(h, doc.tensor.num_vars, &format!("hamiltonians[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    NambuSystem::new(tensor, hams)
}

pub fn to_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unit_vector;
    use crate::poly::{int, rat};

    #[test]
    fn poly_round_trip() {
        let p = Poly::parse(3, "3/2 x1^2 x3 - x2 + 7").unwrap();
        assert_eq!(poly_from_value(&poly_to_value(&p), 3).unwrap(), p);
        let v = serde_json::json!([{"coef": 2, "exps": [1, 0]}, {"coef": "0.5", "exps": [1, 0]}]);
        assert_eq!(poly_from_value(&v, 2).unwrap(), Poly::var(2, 0).scale(&rat(5, 2)));
        assert!(poly_from_value(&v, 3).is_err());
    }

    #[test]
    fn multivector_round_trip() {
        let v = MultiVector::blade(4, &[0, 2]).mul_poly(&Poly::parse(4, "x4 - 1/3").unwrap()).unwrap();
        let text = to_pretty(&multivector_to_value(&v));
        assert!(text.contains("\"indices\": [\n        1,\n        3"));
        assert_eq!(multivector_from_str(&text).unwrap(), v);
    }

    #[test]
    fn swapped_indices_carry_sign() {
        let text = r#"{"num_vars":2,"degree":2,"components":[{"indices":[2,1],"poly":[{"coef":"1","exps":[0,0]}]}]}"#;
        assert_eq!(multivector_from_str(text).unwrap(), MultiVector::blade(2, &[0, 1]).neg());
    }

    #[test]
    fn nlie_round_trip() {
        let p = NLieStructure::from_constants(4, 3, [(vec![0, 1, 2], unit_vector(4, 3))]).unwrap();
        let text = to_pretty(&nlie_to_value(&p));
        assert_eq!(nlie_from_str(&text).unwrap(), p);
        let vp = NLieStructure::vector_product_algebra(4).unwrap();
        assert_eq!(nlie_from_str(&nlie_to_value(&vp).to_string()).unwrap(), vp);
    }

    #[test]
    fn pair_round_trip() {
        let op = JacobiOp::new(MultiVector::blade(3, &[0, 1]), MultiVector::blade(3, &[2]).scale(&int(2))).unwrap();
        assert_eq!(pair_from_str(&pair_to_value(&op).to_string()).unwrap(), op);
    }

    #[test]
    fn errors_have_locations() {
        let err = nlie_from_str("{\"dim\": 4,\n \"arity\": }").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = nlie_from_str(r#"{"dim":4,"arity":3,"constants":[{"indices":[1,2,5],"value":["0","0","0","1"]}]}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("constants[0].indices"), "{err}");
        let err = multivector_from_str(r#"{"num_vars":2,"degree":1,"components":[{"indices":[1],"poly":[{"coef":"x","exps":[0,0]}]}]}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("components[0].poly[0].coef"), "{err}");
    }
}
