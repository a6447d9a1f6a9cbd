//! Finite channel-input alphabets.
//!
//! A [`Constellation`] is an ordered list of distinct complex symbols together
//! with a peak amplitude bound. The position of a symbol in the list is its
//! index everywhere else in the crate: pmfs, region probabilities and
//! codewords are all arrays aligned to that order.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack allowed when checking `|x| <= peak_power`.
const PEAK_TOLERANCE: f64 = 1e-12;

/// A point of the complex plane.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexSymbol {
    pub re: f64,
    pub im: f64,
}

impl ComplexSymbol {
    pub const ZERO: ComplexSymbol = ComplexSymbol { re: 0.0, im: 0.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    /// `|x|²`
    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    #[inline]
    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl Add for ComplexSymbol {
    type Output = ComplexSymbol;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        ComplexSymbol::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for ComplexSymbol {
    type Output = ComplexSymbol;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        ComplexSymbol::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul<f64> for ComplexSymbol {
    type Output = ComplexSymbol;
    #[inline]
    fn mul(self, rhs: f64) -> Self {
        ComplexSymbol::new(self.re * rhs, self.im * rhs)
    }
}

/// Energy `s = |x|²` of a symbol.
#[inline]
pub fn symbol_energy(x: ComplexSymbol) -> f64 {
    x.norm_sqr()
}

/// Ordered set of channel-input symbols with a peak amplitude constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    symbols: Vec<ComplexSymbol>,
    peak_power: f64,
}

impl Constellation {
    /// Builds a constellation from an explicit symbol list.
    ///
    /// When `peak_power` is `None` it defaults to the largest symbol
    /// magnitude.
    pub fn new(symbols: Vec<ComplexSymbol>, peak_power: Option<f64>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::invalid("constellation needs at least one symbol"));
        }
        if let Some(bad) = symbols.iter().find(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("non-finite symbol {bad:?}")));
        }
        for (i, a) in symbols.iter().enumerate() {
            if let Some(j) = symbols[i + 1..].iter().position(|b| b == a) {
                return Err(Error::invalid(format!(
                    "symbols {} and {} coincide at ({}, {})",
                    i + 1,
                    i + 2 + j,
                    a.re,
                    a.im
                )));
            }
        }
        let max_abs = symbols.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let peak_power = match peak_power {
            None => max_abs,
            Some(p) if !(p.is_finite() && p >= 0.0) => {
                return Err(Error::invalid(format!(
                    "peak power must be finite and nonnegative, got {p}"
                )))
            }
            Some(p) => {
                if max_abs > p * (1.0 + PEAK_TOLERANCE) {
                    return Err(Error::invalid(format!(
                        "symbol magnitude {max_abs} exceeds the peak-power constraint {p}"
                    )));
                }
                p
            }
        };
        Ok(Self {
            symbols,
            peak_power,
        })
    }

    /// Square `order`-point QAM with coordinates `±(2k-1)·half_spacing`.
    ///
    /// Symbols are sorted by real part, then imaginary part, both ascending.
    /// Look symbols up with [`Constellation::index_of`] rather than relying on
    /// the position of a particular point.
    pub fn rect_qam(order: usize, half_spacing: f64) -> Result<Self> {
        let side = (order as f64).sqrt().round() as usize;
        if order < 4 || side * side != order || !side.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "QAM order must be an even perfect square (4, 16, 64, ...), got {order}"
            )));
        }
        if !(half_spacing.is_finite() && half_spacing > 0.0) {
            return Err(Error::invalid(format!(
                "half spacing must be positive, got {half_spacing}"
            )));
        }
        let levels: Vec<f64> = (0..side)
            .map(|k| (2.0 * k as f64 - (side as f64 - 1.0)) * half_spacing)
            .collect();
        let symbols = levels
            .iter()
            .flat_map(|&re| levels.iter().map(move |&im| ComplexSymbol::new(re, im)))
            .collect::<Vec<_>>();
        let corner = levels[side - 1];
        let peak = (2.0 * corner * corner).sqrt();
        Self::new(symbols, Some(peak))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[ComplexSymbol] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> ComplexSymbol {
        self.symbols[index]
    }

    pub fn peak_power(&self) -> f64 {
        self.peak_power
    }

    /// Index of the symbol equal to `x`, if present.
    pub fn index_of(&self, x: ComplexSymbol) -> Option<usize> {
        self.symbols.iter().position(|&s| s == x)
    }

    /// If the symbols form a full Cartesian grid `R × I`, returns the sorted
    /// distinct real and imaginary coordinates.
    pub fn product_grid(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut re: Vec<f64> = self.symbols.iter().map(|x| x.re).collect();
        let mut im: Vec<f64> = self.symbols.iter().map(|x| x.im).collect();
        re.sort_by(f64::total_cmp);
        re.dedup();
        im.sort_by(f64::total_cmp);
        im.dedup();
        // symbols are distinct, so |R|·|I| = L means every grid point is present
        (re.len() * im.len() == self.symbols.len()).then_some((re, im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qam16_matches_listed_symbols() {
        let c = Constellation::rect_qam(16, 5.0).unwrap();
        assert_eq!(c.len(), 16);
        for &(re, im) in &[(15.0, 15.0), (-5.0, -15.0), (5.0, 5.0), (-15.0, 5.0)] {
            assert!(c.index_of(ComplexSymbol::new(re, im)).is_some());
        }
        assert!((c.peak_power() - 450f64.sqrt()).abs() < 1e-12);
        assert!((c.peak_power() - 21.2132).abs() < 1e-4);
    }

    #[test]
    fn qam4_is_the_unit_square() {
        let c = Constellation::rect_qam(4, 5.0).unwrap();
        let mut got: Vec<_> = c.symbols().iter().map(|x| (x.re, x.im)).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(
            got,
            vec![(-5.0, -5.0), (-5.0, 5.0), (5.0, -5.0), (5.0, 5.0)]
        );
    }

    #[test]
    fn qam_rejects_non_square_orders() {
        assert!(Constellation::rect_qam(8, 1.0).is_err());
        assert!(Constellation::rect_qam(9, 1.0).is_err());
        assert!(Constellation::rect_qam(16, 0.0).is_err());
    }

    #[test]
    fn qam_grid_is_reflection_symmetric() {
        for order in [4, 16, 64] {
            let c = Constellation::rect_qam(order, 1.5).unwrap();
            for &x in c.symbols() {
                for (sr, si) in [(1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    assert!(c
                        .index_of(ComplexSymbol::new(sr * x.re, si * x.im))
                        .is_some());
                }
            }
            assert!(c.product_grid().is_some());
        }
    }

    #[test]
    fn energy_of_symbols() {
        assert_eq!(symbol_energy(ComplexSymbol::new(5.0, 5.0)), 50.0);
        assert_eq!(symbol_energy(ComplexSymbol::new(15.0, 15.0)), 450.0);
        assert_eq!(symbol_energy(ComplexSymbol::ZERO), 0.0);
    }

    #[test]
    fn validation() {
        let s = vec![ComplexSymbol::new(3.0, 4.0), ComplexSymbol::new(0.0, 1.0)];
        assert_eq!(
            Constellation::new(s.clone(), None).unwrap().peak_power(),
            5.0
        );
        assert!(Constellation::new(s.clone(), Some(4.9)).is_err());
        assert!(Constellation::new(s, Some(5.0)).is_ok());
        assert!(Constellation::new(vec![], None).is_err());
        let dup = vec![ComplexSymbol::new(1.0, 1.0), ComplexSymbol::new(1.0, 1.0)];
        assert!(Constellation::new(dup, None).is_err());
        assert!(Constellation::new(vec![ComplexSymbol::new(f64::NAN, 0.0)], None).is_err());
    }

    #[test]
    fn non_grid_sets_are_detected() {
        let c = Constellation::new(
            vec![
                ComplexSymbol::new(0.0, 0.0),
                ComplexSymbol::new(1.0, 0.0),
                ComplexSymbol::new(0.0, 1.0),
            ],
            None,
        )
        .unwrap();
        assert!(c.product_grid().is_none());
    }
}
