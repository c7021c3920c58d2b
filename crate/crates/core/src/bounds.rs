//! Closed-form bounds, all in exact integer arithmetic.

use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundsError {
    /// The bichromatic bound is only stated for genus at least 1.
    GenusBelowOne(u64),
    /// The edge bound needs at least three vertices.
    TooFewVertices(u64),
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::GenusBelowOne(g) => write!(f, "genus must be at least 1, got {g}"),
            BoundsError::TooFewVertices(v) => write!(f, "need at least 3 vertices, got {v}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formula {
    BichromaticUpper,
    BigenusLower,
    FamilyGenus,
    EdgeBound,
}

impl Formula {
    pub fn name(self) -> &'static str {
        match self {
            Formula::BichromaticUpper => "bichromatic_upper",
            Formula::BigenusLower => "bigenus_lower",
            Formula::FamilyGenus => "b_of_s",
            Formula::EdgeBound => "edge_bound",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundsReport {
    pub formula: Formula,
    pub input: i64,
    pub value: i64,
}

/// Floor of the square root, by Newton iteration on integers.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    // Start above the root; the iteration decreases monotonically to it.
    let mut x = 1u128 << ((128 - n.leading_zeros()).div_ceil(2));
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// `floor((13 + sqrt(73 + 96 g)) / 2)`.
///
/// `floor(sqrt(r))` may replace `sqrt(r)` here: for an integer `t`,
/// `13 + sqrt(r) >= 2t` iff `sqrt(r) >= 2t - 13` iff `isqrt(r) >= 2t - 13`.
pub fn bichromatic_upper(genus: u64) -> Result<u64, BoundsError> {
    if genus < 1 {
        return Err(BoundsError::GenusBelowOne(genus));
    }
    let root = isqrt(73 + 96 * genus as u128);
    Ok(((13 + root) / 2) as u64)
}

/// `ceil((n^2 - 13 n + 24) / 24)`, rounding toward positive infinity even
/// when the numerator is negative (n <= 10).
pub fn bigenus_lower(n: u64) -> i64 {
    let n = n as i128;
    let num = n * n - 13 * n + 24;
    ceil_div(num, 24) as i64
}

/// `b(s) = 24 s^2 + 29 s + 8`, the genus of both halves of the family's
/// biembedding of `K_{24s+21}`.
pub fn b_of_s(s: u64) -> u64 {
    24 * s * s + 29 * s + 8
}

/// `3v - 6 + 6g`, the most edges a simple graph on `v` vertices can have in
/// the genus-`g` surface.
pub fn edge_bound(vertices: u64, genus: u64) -> Result<u64, BoundsError> {
    if vertices < 3 {
        return Err(BoundsError::TooFewVertices(vertices));
    }
    Ok(3 * vertices - 6 + 6 * genus)
}

fn ceil_div(num: i128, den: i128) -> i128 {
    let q = num.div_euclid(den);
    if num.rem_euclid(den) == 0 {
        q
    } else {
        q + 1
    }
}
