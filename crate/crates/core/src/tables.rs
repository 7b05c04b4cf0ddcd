//! Published Bethe roots and energies for the t-J chain with couplings
//! η = 0.2, μ = 2, ζ = 0.1, c = 0.1, c₁ = −0.5, ζ' = −0.5, c' = −0.3,
//! c₁' = −0.7, for L = 2 and L = 3. Roots are printed to four decimals and
//! energies to six.

use crate::graded::Complex;
use crate::kernels::ModelParams;
use crate::tq::BetheRootSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintedRow {
    /// Level label (energy order).
    pub n: usize,
    pub u: &'static [(f64, f64)],
    pub nu: &'static [(f64, f64)],
    pub energy: f64,
}

impl PrintedRow {
    pub fn roots(&self) -> BetheRootSet {
        let cv = |xs: &[(f64, f64)]| xs.iter().map(|&(a, b)| Complex::new(a, b)).collect();
        BetheRootSet { u: cv(self.u), nu: cv(self.nu) }
    }

    pub fn m(&self) -> usize {
        self.u.len()
    }
}

/// Rows for a chain of `len` sites, if published.
pub fn printed_rows(len: usize) -> Option<&'static [PrintedRow]> {
    match len {
        2 => Some(TABLE_L2),
        3 => Some(TABLE_L3),
        _ => None,
    }
}

/// True when `p` carries the published couplings (any θ, any length).
pub fn is_table_params(p: &ModelParams) -> bool {
    let t = ModelParams::table(p.len());
    let close = |a: Complex, b: Complex| (a - b).norm() < 1e-12;
    close(p.eta, t.eta)
        && close(p.mu, t.mu)
        && [(p.minus, t.minus), (p.plus, t.plus)]
            .iter()
            .all(|(a, b)| close(a.zeta, b.zeta) && close(a.c, b.c) && close(a.c1, b.c1) && close(a.c2, b.c2))
}

/// L = 2, nine levels.
pub const TABLE_L2: &[PrintedRow] = &[
    PrintedRow { n: 1, u: &[(-0.1000, -1.6602), (0.1004, 0.0000)], nu: &[(0.1264, 3.3108), (0.1264, -3.3108)], energy: -5.312156 },
    PrintedRow { n: 2, u: &[(-0.1000, -0.2048), (0.1004, 0.0000)], nu: &[(0.8095, -3.4060), (0.8095, 3.4060)], energy: -4.555656 },
    PrintedRow { n: 3, u: &[(0.1005, 0.0000)], nu: &[(0.0000, -3.3070)], energy: -3.325040 },
    PrintedRow { n: 4, u: &[(-0.1000, -1.6539), (-0.1000, -0.2053)], nu: &[(0.0255, 3.3085), (0.0255, -3.3085)], energy: -3.218186 },
    PrintedRow { n: 5, u: &[(-0.1000, -3.7095), (-0.1000, -0.1000)], nu: &[(0.0000, -4.6812), (0.1496, 0.0000)], energy: -1.996355 },
    PrintedRow { n: 6, u: &[(-0.1000, -2.3555)], nu: &[(0.0000, -3.7060)], energy: -1.992804 },
    PrintedRow { n: 7, u: &[(-0.1000, 0.2040)], nu: &[(0.0000, 3.3148)], energy: -1.225154 },
    PrintedRow { n: 8, u: &[], nu: &[], energy: 0.000000 },
    PrintedRow { n: 9, u: &[(-0.1000, -0.0999)], nu: &[(-0.1496, 0.0000)], energy: 0.001822 },
];

/// L = 3, twenty-seven levels.
#[allow(clippy::approx_constant)]
pub const TABLE_L3: &[PrintedRow] = &[
    PrintedRow { n: 1, u: &[(0.1183, 0.0000), (0.8870, 0.0000), (0.4749, 0.0000)], nu: &[(0.0000, 2.1850), (1.5149, -4.0404), (1.5149, 4.0404)], energy: -7.229050 },
    PrintedRow { n: 2, u: &[(0.1073, 0.0000), (-0.1000, -0.1218), (-0.1000, 2.3587)], nu: &[(0.0000, -0.1091), (0.9332, -4.1573), (0.9332, 4.1573)], energy: -5.595946 },
    PrintedRow { n: 3, u: &[(0.1183, 0.0000), (0.4290, 0.0000)], nu: &[(0.8379, -3.4029), (0.8379, 3.4029)], energy: -5.210221 },
    PrintedRow { n: 4, u: &[(1.4165, 0.0000), (-0.3183, 0.0000)], nu: &[(0.9773, -3.3657), (0.9773, 3.3657)], energy: -5.079400 },
    PrintedRow { n: 5, u: &[(0.1182, 0.0000), (0.4997, 0.0000), (-0.1000, -0.0701)], nu: &[(0.0000, 1.9912), (1.4407, -4.0634), (1.4407, 4.0634)], energy: -4.495822 },
    PrintedRow { n: 6, u: &[(-0.1000, 0.0701), (0.1183, 0.0000), (0.8474, 0.0000)], nu: &[(0.0000, -2.1041), (1.4824, -4.0500), (1.4824, 4.0500)], energy: -4.426045 },
    PrintedRow { n: 7, u: &[(0.0005, -0.0704), (0.0005, 0.0704), (-0.1000, 2.3565)], nu: &[(0.0000, 0.0684), (0.9328, -4.1576), (0.9328, 4.1576)], energy: -4.253561 },
    PrintedRow { n: 8, u: &[(1.4210, 0.0000), (0.4273, 0.0000)], nu: &[(0.9950, -3.3623), (0.9950, 3.3623)], energy: -4.166597 },
    PrintedRow { n: 9, u: &[(-0.1000, -0.1216), (0.1073, 0.0000)], nu: &[(0.0000, -3.8739), (0.0000, -0.1092)], energy: -3.598898 },
    PrintedRow { n: 10, u: &[(-0.1000, 0.0701), (0.8813, 0.0000), (0.4760, 0.0000)], nu: &[(1.5100, -4.0418), (1.5100, 4.0418), (0.0000, 2.1735)], energy: -3.484233 },
    PrintedRow { n: 11, u: &[(0.1183, 0.0000)], nu: &[(0.0000, 3.3063)], energy: -3.061679 },
    PrintedRow { n: 12, u: &[(-0.1000, -0.1733), (-0.1000, -2.8910)], nu: &[(0.0000, 4.5408), (0.0000, -0.0711)], energy: -2.996075 },
    PrintedRow { n: 13, u: &[(-0.1000, -0.0601), (-0.1000, 2.3432), (-0.1000, -0.3120)], nu: &[(0.9298, -4.1596), (0.9298, 4.1596), (0.1995, 0.0000)], energy: -2.682705 },
    PrintedRow { n: 14, u: &[(-0.1000, 0.0700), (0.1183, 0.0000)], nu: &[(0.8135, -3.4056), (0.8135, 3.4056)], energy: -2.378366 },
    PrintedRow { n: 15, u: &[(0.0004, -0.0699), (0.0004, 0.0699)], nu: &[(0.0000, -3.8760), (0.0000, -0.0680)], energy: -2.256786 },
    PrintedRow { n: 16, u: &[(0.4178, 0.0000)], nu: &[(0.0000, -3.2852)], energy: -2.154975 },
    PrintedRow { n: 17, u: &[(1.7975, 0.0000)], nu: &[(0.0000, -2.9281)], energy: -2.011140 },
    PrintedRow { n: 18, u: &[(-0.1000, -0.0577), (-0.1000, 0.1731), (-0.1000, 4.5434)], nu: &[(0.1682, -0.0768), (0.1682, 0.0768), (0.0000, -5.7342)], energy: -1.997344 },
    PrintedRow { n: 19, u: &[(-0.1000, -0.0700), (-0.6290, 0.0000)], nu: &[(0.8334, 3.4033), (0.8334, -3.4033)], energy: -1.464602 },
    PrintedRow { n: 20, u: &[(-0.1000, 0.0700), (1.4155, 0.0000)], nu: &[(0.9731, -3.3664), (0.9731, 3.3664)], energy: -1.333802 },
    PrintedRow { n: 21, u: &[(-0.1000, 0.1730)], nu: &[(0.0000, 0.0709)], energy: -0.998177 },
    PrintedRow { n: 22, u: &[(-0.1000, -0.0577), (-0.1000, 2.8833)], nu: &[(0.1777, 0.0000), (0.0000, -4.5376)], energy: -0.995481 },
    PrintedRow { n: 23, u: &[(-0.1000, -0.0601), (-0.1000, 0.3107)], nu: &[(0.0000, -3.8889), (-0.1993, 0.0000)], energy: -0.686247 },
    PrintedRow { n: 24, u: &[], nu: &[], energy: 0.000000 },
    PrintedRow { n: 25, u: &[(-0.1000, 0.1731), (-0.1000, -0.0577)], nu: &[(0.1682, -0.0768), (0.1682, 0.0768)], energy: 0.001770 },
    PrintedRow { n: 26, u: &[(-0.1000, 0.0700)], nu: &[(0.0000, 3.3113)], energy: 0.684187 },
    PrintedRow { n: 27, u: &[(-0.1000, -0.0577)], nu: &[(0.1776, 0.0000)], energy: 1.000607 },
];
