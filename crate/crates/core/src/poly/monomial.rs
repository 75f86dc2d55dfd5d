use std::cmp::Ordering;

/// Sparse exponent vector: `(variable index, exponent)` pairs sorted by
/// variable index, exponents strictly positive.
///
/// The `Ord` impl is graded lexicographic: total degree first, then the
/// exponent of the earliest declared variable where the two differ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: Vec<(u32, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { exps: Vec::new() }
    }

    pub fn var(i: usize, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial {
                exps: vec![(i as u32, e)],
            }
        }
    }

    /// Builds from unsorted pairs; repeated indices are merged, zeros dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut exps: Vec<(u32, u32)> = pairs
            .into_iter()
            .filter(|(_, e)| *e > 0)
            .map(|(i, e)| (i as u32, e))
            .collect();
        exps.sort_unstable();
        let mut merged: Vec<(u32, u32)> = Vec::with_capacity(exps.len());
        for (i, e) in exps {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += e,
                _ => merged.push((i, e)),
            }
        }
        Monomial { exps: merged }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.exps.iter().map(|&(i, e)| (i as usize, e))
    }

    pub fn exponent(&self, var: usize) -> u32 {
        match self.exps.binary_search_by_key(&(var as u32), |p| p.0) {
            Ok(k) => self.exps[k].1,
            Err(_) => 0,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().map(|p| p.1).sum()
    }

    /// Degree counting only the variables for which `counts` is true.
    pub fn degree_where(&self, counts: impl Fn(usize) -> bool) -> u32 {
        self.iter()
            .filter(|(i, _)| counts(*i))
            .map(|(_, e)| e)
            .sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut a, mut b) = (0, 0);
        while a < self.exps.len() && b < other.exps.len() {
            let (x, y) = (self.exps[a], other.exps[b]);
            match x.0.cmp(&y.0) {
                Ordering::Less => {
                    out.push(x);
                    a += 1;
                }
                Ordering::Greater => {
                    out.push(y);
                    b += 1;
                }
                Ordering::Equal => {
                    out.push((x.0, x.1 + y.1));
                    a += 1;
                    b += 1;
                }
            }
        }
        out.extend_from_slice(&self.exps[a..]);
        out.extend_from_slice(&other.exps[b..]);
        Monomial { exps: out }
    }

    pub fn pow(&self, e: u32) -> Monomial {
        if e == 0 {
            return Monomial::one();
        }
        Monomial {
            exps: self.exps.iter().map(|&(i, x)| (i, x * e)).collect(),
        }
    }

    /// `self / other` when every exponent stays non-negative.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.exps.len());
        let mut b = 0;
        for &(i, e) in &self.exps {
            if b < other.exps.len() && other.exps[b].0 < i {
                return None;
            }
            if b < other.exps.len() && other.exps[b].0 == i {
                let f = other.exps[b].1;
                b += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((i, e - f)),
                }
            } else {
                out.push((i, e));
            }
        }
        if b < other.exps.len() {
            return None;
        }
        Some(Monomial { exps: out })
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        other.div(self).is_some()
    }

    /// `Some(self^(1/m))` when every exponent is divisible by `m`.
    pub fn root(&self, m: u32) -> Option<Monomial> {
        if self.exps.iter().all(|&(_, e)| e % m == 0) {
            Some(Monomial {
                exps: self.exps.iter().map(|&(i, e)| (i, e / m)).collect(),
            })
        } else {
            None
        }
    }

    /// Part of the monomial whose variables satisfy `keep`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .copied()
                .filter(|&(i, _)| keep(i as usize))
                .collect(),
        }
    }

    /// Relabels variable indices; `map` must be injective on the support.
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> Monomial {
        Monomial::from_pairs(self.iter().map(|(i, e)| (map(i), e)))
    }

    /// Componentwise minimum.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .filter_map(|&(i, e)| {
                    let f = other.exponent(i as usize);
                    (f > 0).then_some((i, e.min(f)))
                })
                .collect(),
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| lex_cmp(&self.exps, &other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn lex_cmp(a: &[(u32, u32)], b: &[(u32, u32)]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if x.0 != y.0 {
            // the side carrying the earlier variable has the larger exponent there
            return if x.0 < y.0 {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        if x.1 != y.1 {
            return x.1.cmp(&y.1);
        }
    }
    a.len().cmp(&b.len())
}
