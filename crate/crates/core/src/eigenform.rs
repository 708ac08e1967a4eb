//! Elliptic eigenforms as records: a monic minimal polynomial `f` and Hecke
//! eigenvalues written as polynomials in a root of `f`.
//!
//! Record files are line oriented; records are separated by blank lines and
//! `#` starts a comment:
//!
//! ```text
//! level 3
//! weight 16
//! label 3.16.109
//! minpoly 1 234
//! a 2 -234
//! a 3 -2187
//! ell 109 1
//! ```
//!
//! `minpoly` and each `a q ...` list coefficients from the highest degree
//! down; eigenvalue coefficients may be rationals `n/d`.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenformRecord {
    pub level: u64,
    pub weight: u64,
    pub label: String,
    /// Monic, highest degree first.
    pub minpoly: Vec<BigInt>,
    /// `a_q = g(alpha)`, coefficients of `g` highest degree first.
    pub eigenvalues: BTreeMap<u64, Vec<Rational>>,
    /// Congruence prime and its exponent.
    pub ell: Option<(u64, u32)>,
}

type RatMatrix = Vec<Vec<Rational>>;

fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|t| &a[i][t] * &b[t][j]).sum())
                .collect()
        })
        .collect()
}

fn det(mut a: RatMatrix) -> Rational {
    let n = a.len();
    let mut d = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            d = -d;
        }
        d *= &a[col][col];
        for r in col + 1..n {
            if !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
    }
    d
}

impl EigenformRecord {
    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    /// Companion matrix of `f`; `g(C)` represents multiplication by `g(alpha)`.
    fn companion(&self) -> RatMatrix {
        let n = self.degree();
        let mut c = vec![vec![Rational::zero(); n]; n];
        for i in 1..n {
            c[i][i - 1] = Rational::one();
        }
        // f = x^n + c_{n-1} x^{n-1} + ... + c_0, stored highest first.
        for i in 0..n {
            c[i][n - 1] = -Rational::from_integer(self.minpoly[n - i].clone());
        }
        c
    }

    /// `h(C)` for `h` given highest degree first.
    fn poly_at_companion(&self, h: &[Rational]) -> RatMatrix {
        let c = self.companion();
        let n = self.degree();
        let mut acc = vec![vec![Rational::zero(); n]; n];
        for coef in h {
            acc = mat_mul(&acc, &c);
            for (i, row) in acc.iter_mut().enumerate() {
                row[i] += coef;
            }
        }
        acc
    }

    pub fn eigenvalue(&self, q: u64) -> Option<&[Rational]> {
        self.eigenvalues.get(&q).map(Vec::as_slice)
    }

    /// `a_q` when it is rational.
    pub fn rational_eigenvalue(&self, q: u64) -> Option<Rational> {
        let g = self.eigenvalue(q)?;
        if self.degree() == 1 {
            let alpha = -Rational::from_integer(self.minpoly[1].clone());
            return Some(g.iter().fold(Rational::zero(), |acc, c| acc * &alpha + c));
        }
        match g {
            [] => Some(Rational::zero()),
            [c] => Some(c.clone()),
            _ => None,
        }
    }

    /// Sum of `a_q` over the Galois conjugates of the form.
    pub fn trace_eigenvalue(&self, q: u64) -> Result<Rational> {
        let g = self.eigenvalue(q).ok_or_else(|| {
            Error::Validation(format!(
                "record {} has no eigenvalue at q = {q}",
                self.label
            ))
        })?;
        let m = self.poly_at_companion(g);
        Ok((0..self.degree()).map(|i| m[i][i].clone()).sum())
    }

    /// `Res(f, c - g) = N(c - a_q)` for monic `f`.
    pub fn norm_of_difference(&self, q: u64, c: &Rational) -> Result<Rational> {
        let g = self.eigenvalue(q).ok_or_else(|| {
            Error::Validation(format!(
                "record {} has no eigenvalue at q = {q}",
                self.label
            ))
        })?;
        let mut m = self.poly_at_companion(g);
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += c;
        }
        Ok(det(m))
    }

    fn validate(&self) -> Result<()> {
        if self.minpoly.len() < 2 || !self.minpoly[0].is_one() {
            return Err(Error::Validation(format!(
                "record {}: minimal polynomial must be monic of degree >= 1",
                self.label
            )));
        }
        if let Some((q, g)) = self
            .eigenvalues
            .iter()
            .find(|(_, g)| g.len() > self.degree())
        {
            return Err(Error::Validation(format!(
                "record {}: a_{q} has {} coefficients, degree of f is {}",
                self.label,
                g.len(),
                self.degree()
            )));
        }
        if self.level == 0 || self.weight == 0 {
            return Err(Error::Validation(format!(
                "record {}: level and weight must be positive",
                self.label
            )));
        }
        Ok(())
    }
}

/// Parses record text.
pub fn parse_records(text: &str) -> Result<Vec<EigenformRecord>> {
    #[derive(Default)]
    struct Partial {
        start: usize,
        level: Option<u64>,
        weight: Option<u64>,
        label: Option<String>,
        minpoly: Option<Vec<BigInt>>,
        eigenvalues: BTreeMap<u64, Vec<Rational>>,
        ell: Option<(u64, u32)>,
    }
    fn finish(p: Partial) -> Result<EigenformRecord> {
        let missing = |what: &str| Error::Parse {
            line: p.start,
            msg: format!("record is missing `{what}`"),
        };
        let rec = EigenformRecord {
            level: p.level.ok_or_else(|| missing("level"))?,
            weight: p.weight.ok_or_else(|| missing("weight"))?,
            label: p.label.clone().ok_or_else(|| missing("label"))?,
            minpoly: p.minpoly.clone().ok_or_else(|| missing("minpoly"))?,
            eigenvalues: p.eigenvalues,
            ell: p.ell,
        };
        rec.validate()?;
        Ok(rec)
    }

    let mut out = Vec::new();
    let mut cur: Option<Partial> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if let Some(p) = cur.take() {
                out.push(finish(p)?);
            }
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let p = cur.get_or_insert_with(|| Partial {
            start: line_no,
            ..Partial::default()
        });
        let mut words = line.split_whitespace();
        let key = words.next().expect("non-empty line");
        let rest: Vec<&str> = words.collect();
        let int = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| err(format!("expected a positive integer, got {s:?}")))
        };
        match (key, rest.as_slice()) {
            ("level", [v]) => p.level = Some(int(v)?),
            ("weight", [v]) => p.weight = Some(int(v)?),
            ("label", [v]) => p.label = Some((*v).to_string()),
            ("minpoly", cs) if !cs.is_empty() => {
                let coeffs = cs
                    .iter()
                    .map(|c| {
                        c.parse::<BigInt>()
                            .map_err(|_| err(format!("bad coefficient {c:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                p.minpoly = Some(coeffs);
            }
            ("a", [q, cs @ ..]) if !cs.is_empty() => {
                let q = int(q)?;
                let coeffs = cs
                    .iter()
                    .map(|c| parse_rational(c).map_err(|_| err(format!("bad coefficient {c:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                if p.eigenvalues.insert(q, coeffs).is_some() {
                    return Err(err(format!("a_{q} given twice")));
                }
            }
            ("ell", [l, e]) => {
                let e = e
                    .parse::<u32>()
                    .map_err(|_| err(format!("bad exponent {e:?}")))?;
                p.ell = Some((int(l)?, e));
            }
            ("ell", [l]) => p.ell = Some((int(l)?, 1)),
            _ => return Err(err(format!("unrecognized line {line:?}"))),
        }
    }
    if let Some(p) = cur.take() {
        out.push(finish(p)?);
    }
    let mut keys = HashSet::new();
    for r in &out {
        if !keys.insert((r.level, r.weight, r.label.clone())) {
            return Err(Error::Validation(format!(
                "duplicate record (level {}, weight {}, label {})",
                r.level, r.weight, r.label
            )));
        }
    }
    Ok(out)
}

/// Reads a record file, or every `.txt` file of a directory in name order.
pub fn ingest_records(path: &Path) -> Result<Vec<EigenformRecord>> {
    if path.is_dir() {
        let mut files: Vec<_> = std::fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .collect();
        files.sort();
        let mut all = Vec::new();
        for f in files {
            all.extend(ingest_records(&f)?);
        }
        let mut keys = HashSet::new();
        for r in &all {
            if !keys.insert((r.level, r.weight, r.label.clone())) {
                return Err(Error::Validation(format!("duplicate record {}", r.label)));
            }
        }
        return Ok(all);
    }
    parse_records(&std::fs::read_to_string(path)?)
}

/// Records shipped with the library: level one forms and the level `p`
/// forms appearing in the congruence table.
pub fn bundled_records() -> Vec<EigenformRecord> {
    let mut all =
        parse_records(include_str!("../data/level1.txt")).expect("bundled level one data");
    all.extend(parse_records(include_str!("../data/forms.txt")).expect("bundled level p data"));
    all
}

/// Sum of `a_q` over all records of the given level and weight, checking
/// that their degrees add up to `dim`.
pub fn eigenvalue_sum(
    records: &[EigenformRecord],
    level: u64,
    weight: u64,
    q: u64,
    dim: u64,
) -> Result<Rational> {
    let chosen: Vec<_> = records
        .iter()
        .filter(|r| r.level == level && r.weight == weight)
        .collect();
    let total: usize = chosen.iter().map(|r| r.degree()).sum();
    if total as u64 != dim {
        if chosen.is_empty() {
            return Err(Error::DataMissing { level, weight });
        }
        return Err(Error::Validation(format!(
            "records of level {level}, weight {weight} span dimension {total}, expected {dim}"
        )));
    }
    chosen.iter().map(|r| r.trace_eigenvalue(q)).sum()
}

/// `|x|` for an integral rational, as an integer.
pub fn abs_integer(x: &Rational) -> Option<BigInt> {
    x.is_integer().then(|| x.numer().abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    const SAMPLE: &str = "\
# comment
level 3
weight 14
label 3.14.47
minpoly 1 54 -16992
a 2 1 0
ell 47 1

level 3
weight 16
label 3.16.109
minpoly 1 234
a 2 -234
a 3 -2187
";

    #[test]
    fn parse_and_evaluate() {
        let recs = parse_records(SAMPLE).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].degree(), 2);
        assert_eq!(recs[0].trace_eigenvalue(2).unwrap(), rat(-54));
        assert_eq!(
            recs[0].norm_of_difference(2, &rat(-960)).unwrap(),
            rat(852768)
        );
        assert_eq!(recs[1].rational_eigenvalue(3), Some(rat(-2187)));
        assert_eq!(recs[1].rational_eigenvalue(2), Some(rat(-234)));
        assert_eq!(recs[0].ell, Some((47, 1)));
    }

    #[test]
    fn empty_file() {
        assert!(parse_records("").unwrap().is_empty());
        assert!(parse_records("\n# nothing\n").unwrap().is_empty());
    }

    #[test]
    fn malformed() {
        let bad = SAMPLE.replace("weight 14", "weight x");
        assert!(matches!(
            parse_records(&bad),
            Err(Error::Parse { line: 3, .. })
        ));
        let non_monic = SAMPLE.replace("minpoly 1 54", "minpoly 2 54");
        assert!(matches!(
            parse_records(&non_monic),
            Err(Error::Validation(_))
        ));
        let dup = format!(
            "{SAMPLE}\n{}",
            &SAMPLE[SAMPLE.find("level 3\nweight 16").unwrap()..]
        );
        assert!(matches!(parse_records(&dup), Err(Error::Validation(_))));
        let missing = "level 3\nweight 4\n";
        assert!(matches!(
            parse_records(missing),
            Err(Error::Parse { line: 1, .. })
        ));
        let high = SAMPLE.replace("a 2 1 0", "a 2 1 0 0");
        assert!(parse_records(&high).is_err());
    }

    #[test]
    fn bundled_parse() {
        let recs = bundled_records();
        assert!(recs.iter().any(|r| r.level == 1 && r.weight == 12));
        assert_eq!(eigenvalue_sum(&recs, 1, 24, 2, 2).unwrap(), rat(1080));
        assert!(matches!(
            eigenvalue_sum(&recs, 1, 200, 2, 1),
            Err(Error::DataMissing { .. })
        ));
    }
}
