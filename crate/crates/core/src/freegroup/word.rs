use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{free_reduce, Dart, EdgeId};

/// A reduced word in free generators `x0, x1, ...`; generator `i` is the
/// letter `Dart(2i)` and its inverse `Dart(2i + 1)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FreeWord {
    letters: Vec<Dart>,
}

impl FreeWord {
    pub fn new(mut letters: Vec<Dart>) -> FreeWord {
        free_reduce(&mut letters);
        FreeWord { letters }
    }

    pub fn identity() -> FreeWord {
        FreeWord::default()
    }

    pub fn generator(i: usize) -> FreeWord {
        FreeWord {
            letters: vec![Dart::forward(EdgeId(i))],
        }
    }

    pub fn letters(&self) -> &[Dart] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            letters: self.letters.iter().rev().map(|d| d.inverse()).collect(),
        }
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        FreeWord::new(letters)
    }

    pub fn pow(&self, k: i64) -> FreeWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn conjugate_by(&self, c: &FreeWord) -> FreeWord {
        c.mul(self).mul(&c.inverse())
    }

    /// Substitutes `images[i]` for generator `i`.
    pub fn substitute(&self, images: &[FreeWord]) -> FreeWord {
        let mut letters = Vec::new();
        for d in &self.letters {
            let img = &images[d.edge().0];
            if d.is_forward() {
                letters.extend_from_slice(&img.letters);
            } else {
                letters.extend(img.letters.iter().rev().map(|x| x.inverse()));
            }
        }
        FreeWord::new(letters)
    }

    /// Writes `self = a · core · a⁻¹` with `core` cyclically reduced.
    pub fn cyclic_reduction(&self) -> (FreeWord, FreeWord) {
        let l = &self.letters;
        let mut k = 0;
        while l.len() >= 2 * (k + 1) && l[k] == l[l.len() - 1 - k].inverse() {
            k += 1;
        }
        (
            FreeWord {
                letters: l[..k].to_vec(),
            },
            FreeWord {
                letters: l[k..l.len() - k].to_vec(),
            },
        )
    }

    /// The primitive root `ρ` with `self = ρᵐ`, for a cyclically reduced word.
    fn root(&self) -> FreeWord {
        let n = self.len();
        for p in 1..=n {
            if n.is_multiple_of(p) && (p..n).all(|i| self.letters[i] == self.letters[i - p]) {
                return FreeWord {
                    letters: self.letters[..p].to_vec(),
                };
            }
        }
        self.clone()
    }

    /// Formats with generator names `x0, x1, ...` or the supplied names.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        self.letters
            .iter()
            .map(|d| {
                let name = names.get(d.edge().0).cloned().unwrap_or_else(|| format!("x{}", d.edge().0));
                if d.is_forward() {
                    name
                } else {
                    format!("-{name}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&[]))
    }
}

/// All `c` with `c · t · c⁻¹ = u` and `|c| ≤ bound`, shortest first.
fn conjugators(t: &FreeWord, u: &FreeWord, bound: usize) -> Vec<FreeWord> {
    let (a, t0) = t.cyclic_reduction();
    let (b, u0) = u.cyclic_reduction();
    if t0.len() != u0.len() {
        return Vec::new();
    }
    let rho = t0.root();
    let n = t0.len();
    let reach = (bound + a.len() + b.len() + n) / rho.len().max(1) + 2;
    let mut out = Vec::new();
    for s in 0..n {
        // t0 = p·q and u0 = q·p with |p| = s, so p⁻¹·t0·p = u0.
        let rotated: Vec<Dart> = t0.letters[s..].iter().chain(&t0.letters[..s]).copied().collect();
        if rotated != u0.letters {
            continue;
        }
        let p = FreeWord {
            letters: t0.letters[..s].to_vec(),
        };
        for m in -(reach as i64)..=(reach as i64) {
            // Every solution of d·t0·d⁻¹ = u0 is p⁻¹ times an element of the centraliser ⟨ρ⟩.
            let d = p.inverse().mul(&rho.pow(m));
            let c = b.mul(&d).mul(&a.inverse());
            if c.len() <= bound && !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    out
}

/// A word `c` with `|c| ≤ bound` and `lhs[i] = c · rhs[i] · c⁻¹` for every
/// generator image, if one exists.
///
/// The first generator with nontrivial image pins `c` down to a coset of a
/// cyclic centraliser, which is enumerated exactly within the bound.
pub fn find_conjugator(lhs: &[FreeWord], rhs: &[FreeWord], bound: usize) -> Option<FreeWord> {
    if lhs.len() != rhs.len() {
        return None;
    }
    let check = |c: &FreeWord| lhs.iter().zip(rhs).all(|(l, r)| &r.conjugate_by(c) == l);
    match rhs.iter().position(|r| !r.is_identity()) {
        None => check(&FreeWord::identity()).then(FreeWord::identity),
        Some(i) => conjugators(&rhs[i], &lhs[i], bound).into_iter().find(|c| check(c)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> FreeWord {
        let letters = s
            .split_whitespace()
            .map(|t| match t.strip_prefix('-') {
                Some(r) => Dart::backward(EdgeId(r[1..].parse().unwrap())),
                None => Dart::forward(EdgeId(t[1..].parse().unwrap())),
            })
            .collect();
        FreeWord::new(letters)
    }

    #[test]
    fn reduction_and_inverse() {
        assert_eq!(word("x0 x1 -x1 -x0"), FreeWord::identity());
        assert_eq!(word("x0 x1").inverse(), word("-x1 -x0"));
        assert_eq!(word("x0").pow(3), word("x0 x0 x0"));
        assert_eq!(word("x0 x1").pow(-1), word("-x1 -x0"));
    }

    #[test]
    fn cyclic_reduction() {
        let (a, c) = word("x1 x0 x0 -x1").cyclic_reduction();
        assert_eq!(a, word("x1"));
        assert_eq!(c, word("x0 x0"));
        assert_eq!(c.root(), word("x0"));
    }

    #[test]
    fn conjugators_found() {
        let phi = vec![word("x0 x1"), word("x1")];
        let c = word("x1 x0");
        let psi: Vec<FreeWord> = phi.iter().map(|w| w.conjugate_by(&c)).collect();
        let found = find_conjugator(&psi, &phi, 8).unwrap();
        assert!(psi.iter().zip(&phi).all(|(l, r)| &r.conjugate_by(&found) == l));
        assert_eq!(find_conjugator(&phi, &phi, 8), Some(FreeWord::identity()));
        // x0 ↦ x0 and x0 ↦ x0² are never conjugate.
        assert_eq!(find_conjugator(&[word("x0")], &[word("x0 x0")], 8), None);
    }

    #[test]
    fn centraliser_powers_are_searched() {
        // c = x0³ commutes with x0 but not with x1.
        let phi = vec![word("x0"), word("x1 x1")];
        let c = word("x0 x0 x0");
        let psi: Vec<FreeWord> = phi.iter().map(|w| w.conjugate_by(&c)).collect();
        assert_eq!(find_conjugator(&psi, &phi, 8), Some(c));
    }
}
