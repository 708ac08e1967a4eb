//! The bundled table of algebras, maximal orders and genus parameters.

use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::quaternion::{QuaternionAlgebra, QuaternionElement};
use crate::rational::parse_rational;

pub const SUPPORTED_PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

const BUNDLED: &str = include_str!("../data/algebras.toml");

#[derive(Deserialize)]
struct RawFile {
    algebra: Vec<RawAlgebra>,
}

#[derive(Deserialize)]
struct RawAlgebra {
    p: u64,
    a: String,
    b: String,
    basis: [[String; 4]; 4],
    lambda: Option<[String; 4]>,
    mu: Option<[String; 4]>,
}

/// One row of the algebra table. `lambda` and `mu` are optional in user
/// files; when absent they are searched for.
#[derive(Clone, Debug)]
pub struct AlgebraRecord {
    pub p: u64,
    pub algebra: Arc<QuaternionAlgebra>,
    pub basis: [QuaternionElement; 4],
    pub lambda: Option<QuaternionElement>,
    pub mu: Option<QuaternionElement>,
}

fn element(alg: &Arc<QuaternionAlgebra>, c: &[String; 4]) -> Result<QuaternionElement> {
    let mut coords = Vec::with_capacity(4);
    for s in c {
        coords.push(parse_rational(s)?);
    }
    let coords: [_; 4] = coords.try_into().expect("four coordinates");
    Ok(QuaternionElement::new(alg, coords))
}

pub fn parse_records(text: &str) -> Result<Vec<AlgebraRecord>> {
    let raw: RawFile =
        toml::from_str(text).map_err(|e| Error::Validation(format!("algebra table: {e}")))?;
    raw.algebra
        .iter()
        .map(|r| {
            let algebra =
                QuaternionAlgebra::new(parse_rational(&r.a)?, parse_rational(&r.b)?, r.p)?;
            let mut basis = Vec::with_capacity(4);
            for row in &r.basis {
                basis.push(element(&algebra, row)?);
            }
            Ok(AlgebraRecord {
                p: r.p,
                basis: basis.try_into().expect("four basis vectors"),
                lambda: r
                    .lambda
                    .as_ref()
                    .map(|c| element(&algebra, c))
                    .transpose()?,
                mu: r.mu.as_ref().map(|c| element(&algebra, c)).transpose()?,
                algebra,
            })
        })
        .collect()
}

pub fn bundled_records() -> Vec<AlgebraRecord> {
    parse_records(BUNDLED).expect("bundled algebra table parses")
}

pub fn bundled_record(p: u64) -> Result<AlgebraRecord> {
    bundled_records()
        .into_iter()
        .find(|r| r.p == p)
        .ok_or(Error::UnsupportedPrime(p))
}

impl AlgebraRecord {
    /// Checks that `(a, b)` agree with the bundled row for the same prime.
    pub fn check_against_bundled(&self) -> Result<()> {
        let bundled = bundled_record(self.p)?;
        if bundled.algebra.a() != self.algebra.a() || bundled.algebra.b() != self.algebra.b() {
            return Err(Error::Validation(format!(
                "p = {}: algebra ({},{}) differs from the bundled ({},{})",
                self.p,
                self.algebra.a(),
                self.algebra.b(),
                bundled.algebra.a(),
                bundled.algebra.b()
            )));
        }
        Ok(())
    }
}
