//! Limit theory of the N-star model: the α/β parameter algebra, the limit
//! ratio tables `x_{d,w1,w2}` and `x_{w1,w2}`, their Gamma closed forms on the
//! boundary rows, tail constants and power-law exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::special::{ln_factorial, ln_gamma, ln_gamma_ratio};

pub use crate::special::{gamma_ratio, gamma_sum_identity};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    #[serde(rename = "N")]
    pub star_size: usize,
    pub alpha11: f64,
    pub alpha12: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl DerivedParams {
    pub fn new(p: f64, q: f64, r: f64, star_size: usize) -> Result<Self> {
        if p <= 0.0 {
            return Err(Error::DivisionDomain("beta1 = (1-p)(1-q)/p needs p > 0"));
        }
        ModelParams::new(p, q, r, star_size)?;
        let nm1 = star_size as f64 - 1.0;
        let alpha11 = p * r;
        let alpha12 = (1.0 - p) * q;
        let alpha1 = alpha11 + alpha12;
        let alpha2 = p * r * (nm1 - 1.0) / nm1 + (1.0 - p) * q;
        let uniform_ii = (1.0 - p) * (1.0 - q) / p;
        let beta1 = uniform_ii;
        let beta2 = nm1 * ((1.0 - r) + uniform_ii);
        Ok(Self {
            p,
            q,
            r,
            star_size,
            alpha11,
            alpha12,
            alpha1,
            alpha2,
            beta1,
            beta2,
            alpha: alpha1 + alpha2,
            beta: beta1 + beta2,
        })
    }

    pub fn model_params(&self) -> ModelParams {
        ModelParams {
            p: self.p,
            q: self.q,
            r: self.r,
            star_size: self.star_size,
        }
    }

    /// In-degree pmf exponent `1 + (β2 + 1)/α1`.
    pub fn gamma_in(&self) -> f64 {
        1.0 + (self.beta2 + 1.0) / self.alpha1
    }

    /// Out-degree pmf exponent `1 + (β1 + 1)/α2`.
    pub fn gamma_out(&self) -> f64 {
        1.0 + (self.beta1 + 1.0) / self.alpha2
    }

    /// Which of `0 < p, q, r < 1` fails, if any.
    pub fn hypothesis_violation(&self) -> Option<String> {
        let bad: Vec<String> = [("p", self.p), ("q", self.q), ("r", self.r)]
            .iter()
            .filter(|(_, v)| !(*v > 0.0 && *v < 1.0))
            .map(|(name, v)| format!("{name}={v}"))
            .collect();
        (!bad.is_empty()).then(|| bad.join(", "))
    }

    pub fn require_open_cube(&self) -> Result<()> {
        match self.hypothesis_violation() {
            Some(what) => Err(Error::Hypothesis(format!(
                "limit theorems need 0 < p, q, r < 1 ({what})"
            ))),
            None => Ok(()),
        }
    }

    /// Denominator `α1 w1 + α2 w2 + β + 1` shared by both recurrences.
    fn denom(&self, w1: usize, w2: usize) -> f64 {
        self.alpha1 * w1 as f64 + self.alpha2 * w2 as f64 + self.beta + 1.0
    }
}

pub fn derive_params(params: &ModelParams) -> Result<DerivedParams> {
    DerivedParams::new(params.p, params.q, params.r, params.star_size)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoryCaps {
    pub max_d: usize,
    pub max_w1: usize,
    pub max_w2: usize,
    /// Peripheral-weight cap of the degree-resolved table only.
    pub x3_max_w2: usize,
}

impl Default for TheoryCaps {
    fn default() -> Self {
        Self {
            max_d: 200,
            max_w1: 60,
            max_w2: 2000,
            x3_max_w2: 200,
        }
    }
}

impl TheoryCaps {
    pub fn new(max_d: usize, max_w1: usize, max_w2: usize) -> Self {
        Self {
            max_d,
            max_w1,
            max_w2,
            x3_max_w2: max_w2.min(Self::default().x3_max_w2),
        }
    }
}

/// Admissible degree range of a vertex with weights `(w1, w2)`.
fn degree_range(star_size: usize, w1: usize, w2: usize) -> (usize, usize) {
    if w1 == 0 {
        (1, w2)
    } else {
        (star_size - 1, w1 * (star_size - 1) + w2)
    }
}

/// Limit ratios `x_{d,w1,w2}`; cells outside the admissible domain are zero.
#[derive(Clone, Debug)]
pub struct X3Table {
    star_size: usize,
    max_d: usize,
    max_w1: usize,
    max_w2: usize,
    /// `rows[w1][w2][d - lo(w1)]` for `lo <= d <= min(hi, max_d)`.
    rows: Vec<Vec<Vec<f64>>>,
}

impl X3Table {
    pub fn caps(&self) -> (usize, usize, usize) {
        (self.max_d, self.max_w1, self.max_w2)
    }

    fn raw(&self, d: i64, w1: i64, w2: i64) -> f64 {
        if d < 0 || w1 < 0 || w2 < 0 {
            return 0.0;
        }
        let (d, w1, w2) = (d as usize, w1 as usize, w2 as usize);
        if w1 + w2 == 0 {
            return 0.0;
        }
        let (lo, _) = degree_range(self.star_size, w1, w2);
        if d < lo {
            return 0.0;
        }
        self.rows[w1][w2].get(d - lo).copied().unwrap_or(0.0)
    }

    pub fn get(&self, d: usize, w1: usize, w2: usize) -> Result<f64> {
        if d > self.max_d || w1 > self.max_w1 || w2 > self.max_w2 {
            return Err(Error::OutsideCaps(format!(
                "x3({d},{w1},{w2}) beyond caps d<={}, w1<={}, w2<={}",
                self.max_d, self.max_w1, self.max_w2
            )));
        }
        Ok(self.raw(d as i64, w1 as i64, w2 as i64))
    }

    /// `Σ_d x3(d, w1, w2)` over the stored degrees.
    pub fn degree_sum(&self, w1: usize, w2: usize) -> f64 {
        if w1 + w2 == 0 || w1 > self.max_w1 || w2 > self.max_w2 {
            return 0.0;
        }
        self.rows[w1][w2].iter().sum()
    }

    /// Whether the stored row of `(w1, w2)` covers every admissible degree.
    pub fn row_complete(&self, w1: usize, w2: usize) -> bool {
        degree_range(self.star_size, w1, w2).1 <= self.max_d
    }

    /// Non-empty cells as `(d, w1, w2, value)`, ordered by `(w1, w2, d)`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        self.rows.iter().enumerate().flat_map(move |(w1, by_w2)| {
            by_w2.iter().enumerate().flat_map(move |(w2, row)| {
                let lo = degree_range(self.star_size, w1, w2).0;
                row.iter()
                    .enumerate()
                    .map(move |(i, &v)| (lo + i, w1, w2, v))
            })
        })
    }
}

/// Degree-resolved limit table by forward dynamic programming.
pub fn x3_table(derived: &DerivedParams, caps: &TheoryCaps) -> Result<X3Table> {
    derived.require_open_cube()?;
    let big_n = derived.star_size;
    let nm1 = big_n as i64 - 1;
    let max_w2 = caps.x3_max_w2.min(caps.max_w2);
    let mut table = X3Table {
        star_size: big_n,
        max_d: caps.max_d,
        max_w1: caps.max_w1,
        max_w2,
        rows: vec![vec![Vec::new(); max_w2 + 1]; caps.max_w1 + 1],
    };
    let DerivedParams {
        alpha11,
        alpha12,
        alpha2,
        beta1,
        beta2,
        r,
        ..
    } = *derived;

    for w1 in 0..=caps.max_w1 {
        for w2 in 0..=max_w2 {
            if w1 + w2 == 0 {
                continue;
            }
            let (lo, hi) = degree_range(big_n, w1, w2);
            let hi = hi.min(caps.max_d);
            let mut row = vec![0.0; (hi + 1).saturating_sub(lo)];
            match (w1, w2) {
                (1, 0) => {
                    // only degree N-1 is reachable
                    if let Some(v) = row.first_mut() {
                        *v = (1.0 - r) / derived.denom(1, 0);
                    }
                }
                (0, 1) => row[0] = r / derived.denom(0, 1),
                _ => {
                    let (a, b) = (w1 as i64, w2 as i64);
                    let den = derived.denom(w1, w2);
                    let t = &table;
                    for (i, cell) in row.iter_mut().enumerate() {
                        let d = (lo + i) as i64;
                        let mut acc = 0.0;
                        if a >= 1 {
                            acc += alpha11 * (a - 1) as f64 * t.raw(d - 1, a - 1, b);
                            acc += alpha12 * (a - 1) as f64 * t.raw(d, a - 1, b);
                            acc += beta1 * t.raw(d - nm1, a - 1, b);
                        }
                        if b >= 1 {
                            acc += alpha2 * (b - 1) as f64 * t.raw(d, a, b - 1);
                            acc += beta2 * t.raw(d - 1, a, b - 1);
                        }
                        *cell = acc / den;
                    }
                }
            }
            table.rows[w1][w2] = row;
        }
    }
    Ok(table)
}

/// Weight-only limit ratios `x_{w1,w2}`.
#[derive(Clone, Debug)]
pub struct X2Table {
    max_w1: usize,
    max_w2: usize,
    rows: Vec<Vec<f64>>,
}

impl X2Table {
    pub fn caps(&self) -> (usize, usize) {
        (self.max_w1, self.max_w2)
    }

    pub fn get(&self, w1: usize, w2: usize) -> Result<f64> {
        if w1 > self.max_w1 || w2 > self.max_w2 {
            return Err(Error::OutsideCaps(format!(
                "x2({w1},{w2}) beyond caps w1<={}, w2<={}",
                self.max_w1, self.max_w2
            )));
        }
        Ok(self.rows[w1][w2])
    }

    pub fn row(&self, w1: usize) -> &[f64] {
        &self.rows[w1]
    }

    /// `Σ x2(w1, w2)` over the shell `w1 + w2 <= shell`, within caps.
    pub fn partial_mass(&self, shell: usize) -> f64 {
        let mut total = 0.0;
        for (w1, row) in self.rows.iter().enumerate().take(shell + 1) {
            let top = (shell - w1).min(self.max_w2);
            total += row[..=top].iter().sum::<f64>();
        }
        total
    }

    /// Mass of the whole computed table.
    pub fn total_mass(&self) -> f64 {
        self.rows.iter().flatten().sum()
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(w1, row)| {
            row.iter()
                .enumerate()
                .filter(move |&(w2, _)| w1 + w2 > 0)
                .map(move |(w2, &v)| (w1, w2, v))
        })
    }
}

pub fn x2_table(derived: &DerivedParams, caps: &TheoryCaps) -> Result<X2Table> {
    derived.require_open_cube()?;
    let mut rows = vec![vec![0.0; caps.max_w2 + 1]; caps.max_w1 + 1];
    let DerivedParams {
        alpha1,
        alpha2,
        beta1,
        beta2,
        r,
        ..
    } = *derived;
    for w1 in 0..=caps.max_w1 {
        for w2 in 0..=caps.max_w2 {
            let value = match (w1, w2) {
                (0, 0) => 0.0,
                (1, 0) => (1.0 - r) / derived.denom(1, 0),
                (0, 1) => r / derived.denom(0, 1),
                _ => {
                    let mut acc = 0.0;
                    if w1 >= 1 {
                        acc += (alpha1 * (w1 - 1) as f64 + beta1) * rows[w1 - 1][w2];
                    }
                    if w2 >= 1 {
                        acc += (alpha2 * (w2 - 1) as f64 + beta2) * rows[w1][w2 - 1];
                    }
                    acc / derived.denom(w1, w2)
                }
            };
            rows[w1][w2] = value;
        }
    }
    Ok(X2Table {
        max_w1: caps.max_w1,
        max_w2: caps.max_w2,
        rows,
    })
}

/// Everything the theory side produces for one parameter set.
#[derive(Clone, Debug)]
pub struct TheoryTables {
    pub derived: DerivedParams,
    pub caps: TheoryCaps,
    pub x3: X3Table,
    pub x2: X2Table,
}

impl TheoryTables {
    pub fn compute(derived: &DerivedParams, caps: &TheoryCaps) -> Result<Self> {
        Ok(Self {
            derived: *derived,
            caps: *caps,
            x3: x3_table(derived, caps)?,
            x2: x2_table(derived, caps)?,
        })
    }
}

fn ensure_positive(value: f64, what: &'static str) -> Result<()> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::DivisionDomain(what))
    }
}

fn lg(x: f64) -> Result<f64> {
    let (l, sign) = ln_gamma(x)?;
    if sign < 0.0 {
        return Err(Error::IndexDomain(format!("Γ({x}) is negative")));
    }
    Ok(l)
}

/// `x_{0,l}` from its Gamma closed form.
pub fn closed_form_x0l(derived: &DerivedParams, l: u64) -> Result<f64> {
    if l == 0 {
        return Err(Error::IndexDomain(
            "closed form x(0, l) needs l >= 1".into(),
        ));
    }
    let DerivedParams {
        alpha2,
        beta,
        beta2,
        r,
        ..
    } = *derived;
    ensure_positive(alpha2, "alpha2 = 0")?;
    let l = l as f64;
    let (head, _) = ln_gamma_ratio(1.0 + (beta + 1.0) / alpha2, 1.0 + beta2 / alpha2)?;
    let (tail, _) = ln_gamma_ratio(l + beta2 / alpha2, l + (alpha2 + beta + 1.0) / alpha2)?;
    Ok(r / alpha2 * (head + tail).exp())
}

/// `x_{k,0}` from its Gamma closed form.
pub fn closed_form_xk0(derived: &DerivedParams, k: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::IndexDomain(
            "closed form x(k, 0) needs k >= 1".into(),
        ));
    }
    let DerivedParams {
        alpha1,
        beta,
        beta1,
        r,
        ..
    } = *derived;
    ensure_positive(alpha1, "alpha1 = 0")?;
    let k = k as f64;
    let (head, _) = ln_gamma_ratio(1.0 + (beta + 1.0) / alpha1, 1.0 + beta1 / alpha1)?;
    let (tail, _) = ln_gamma_ratio(k + beta1 / alpha1, k + (alpha1 + beta + 1.0) / alpha1)?;
    Ok((1.0 - r) / alpha1 * (head + tail).exp())
}

/// Amplitude `C(w1)` of `x_{w1,w2} ~ C(w1) w2^{-γ_out}` as `w2 → ∞`.
pub fn tail_constant_c(derived: &DerivedParams, w1: u64) -> Result<f64> {
    let DerivedParams {
        alpha1,
        alpha2,
        beta,
        beta1,
        beta2,
        r,
        ..
    } = *derived;
    ensure_positive(alpha1, "alpha1 = 0")?;
    ensure_positive(alpha2, "alpha2 = 0")?;
    if beta1 <= 0.0 {
        return Err(Error::Hypothesis(
            "C(w1) has a Gamma pole at beta1/alpha1 = 0 (p = 1 or q = 1)".into(),
        ));
    }
    let ratio1 = lg(w1 as f64 + beta1 / alpha1)? - lg(beta1 / alpha1)?;
    let ratio2 = lg(1.0 + (beta + 1.0) / alpha2)? - lg(1.0 + beta2 / alpha2)?;
    Ok(r / alpha2 * (ratio1 + ratio2 - ln_factorial(w1)).exp())
}

/// Amplitude `C_0` of `x_{k,0} ~ C_0 k^{-γ_in}` as `k → ∞`.
pub fn tail_constant_c0(derived: &DerivedParams) -> Result<f64> {
    let DerivedParams {
        alpha1,
        beta,
        beta1,
        r,
        ..
    } = *derived;
    ensure_positive(alpha1, "alpha1 = 0")?;
    let ratio = lg(1.0 + (beta + 1.0) / alpha1)? - lg(1.0 + beta1 / alpha1)?;
    Ok((1.0 - r) / alpha1 * ratio.exp())
}

/// Amplitude `A(d2)` of `y_{d1,d2} ~ A(d2) d1^{-γ_in}` as `d1 → ∞`.
pub fn tail_constant_a(derived: &DerivedParams, d2: u64) -> Result<f64> {
    let DerivedParams {
        alpha1,
        alpha2,
        beta,
        beta1,
        beta2,
        r,
        star_size,
        ..
    } = *derived;
    ensure_positive(alpha1, "alpha1 = 0")?;
    ensure_positive(alpha2, "alpha2 = 0")?;
    if beta2 <= 0.0 {
        return Err(Error::Hypothesis(
            "A(d2) has a Gamma pole at beta2/alpha2 = 0".into(),
        ));
    }
    let ratio1 = lg(d2 as f64 + beta2 / alpha2)? - lg(beta2 / alpha2)?;
    let ratio2 = lg(1.0 + (beta + 1.0) / alpha1)? - lg(1.0 + beta1 / alpha1)?;
    let scale = derived.gamma_in() * (star_size as f64 - 1.0).ln();
    Ok((1.0 - r) / alpha1 * (ratio1 + ratio2 - ln_factorial(d2) + scale).exp())
}

/// Amplitude `B(d1) = C(d1 / (N-1))` of the out-degree tail at fixed `d1`.
pub fn tail_constant_b(derived: &DerivedParams, d1: u64) -> Result<f64> {
    let step = derived.star_size as u64 - 1;
    if !d1.is_multiple_of(step) {
        return Err(Error::IndivisibleInDegree { d1, step });
    }
    tail_constant_c(derived, d1 / step)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailConstants {
    /// `C(w1)` for `w1 = 0..`.
    pub c: Vec<f64>,
    pub c0: f64,
    /// `A(d2)` for `d2 = 0..`.
    pub a: Vec<f64>,
    /// `(d1, B(d1))` at `d1 = (N-1) w1`.
    pub b: Vec<(u64, f64)>,
    pub gamma_in: f64,
    pub gamma_out: f64,
}

impl TailConstants {
    pub fn compute(derived: &DerivedParams, max_w1: u64, max_d2: u64) -> Result<Self> {
        derived.require_open_cube()?;
        let c = (0..=max_w1)
            .map(|w1| tail_constant_c(derived, w1))
            .collect::<Result<Vec<_>>>()?;
        let step = derived.star_size as u64 - 1;
        let b = c
            .iter()
            .enumerate()
            .map(|(w1, &v)| (w1 as u64 * step, v))
            .collect();
        Ok(Self {
            c,
            c0: tail_constant_c0(derived)?,
            a: (0..=max_d2)
                .map(|d2| tail_constant_a(derived, d2))
                .collect::<Result<Vec<_>>>()?,
            b,
            gamma_in: derived.gamma_in(),
            gamma_out: derived.gamma_out(),
        })
    }
}

/// Limit `y_{d1,d2}` of `Y(n, d1, d2) / V_n`, read off the weight table
/// through `w1 = d1 / (N-1)`, `w2 = d2`.
pub fn y_limit(tables: &TheoryTables, d1: u64, d2: u64) -> Result<f64> {
    let step = tables.derived.star_size as u64 - 1;
    if !d1.is_multiple_of(step) {
        return Err(Error::IndivisibleInDegree { d1, step });
    }
    let w1 = (d1 / step) as usize;
    if w1 == 0 && d2 == 0 {
        return Ok(0.0);
    }
    tables.x2.get(w1, d2 as usize)
}
