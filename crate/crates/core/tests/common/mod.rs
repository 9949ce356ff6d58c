//! High-precision reference values for the bound calculators, frozen from
//! `oracle/bounds_oracle.py` (mpmath, 50 digits).
#![allow(dead_code, clippy::excessive_precision)]

/// `(K, A*, Ã*, φ, D, C1, C2, C3)` and `E`.
pub const E_GRID: [([f64; 8], f64); 10] = [
    ([1.0, 1.0, 1.0, 2.0, 1.0, 0.0, 1.0, 1.0], 63.127773921306678446),
    ([1.0, 2.0, 0.5, 3.0, 0.8, 0.5, 0.5, 0.25], 252.14640405793598394),
    ([0.5, 1.5, 3.0, 1.2, 2.0, 1.0, 0.9, 0.1], 34.860514925129625008),
    ([2.0, 0.3, 0.7, 1.1, 0.4, 0.0, 0.01, 1.0], 126.67367074888031395),
    ([1.0, 4.0, 4.0, 50.0, 1.0, 2.0, 0.2, 0.5], 552.44863844991820692),
    ([0.1, 1.0, 1.0, 1.5, 10.0, 0.3, 1.0, 0.05], 29.739927934710653144),
    ([1.0, 0.5, 2.0, 1.6, 0.7978845608, 0.0, 0.7, 0.7], 43.031694935235756515),
    ([3.0, 1.0, 0.1, 4.0, 0.2, 5.0, 0.05, 0.9], 8960.2744672075105888),
    ([1.0, 6.0, 24.0, 2000.0, 1.5, 0.1, 0.001, 0.001], 19959.140516508049634),
    ([0.75, 2.5, 1.25, 9.0, 3.0, 0.0, 0.33, 0.66], 118.98232856305190043),
    ];

/// `(T, ε, A)` and `M`.
pub const M_GRID: [(f64, f64, f64, f64); 10] = [
    (64.0, 0.1, 1.0, 1.2368576097769170269),
    (4096.0, 0.1, 1.0, 1.2368576097769170269),
    (128.0, 0.05, 2.5, 24.524997510285612631),
    (4.0, 0.5, 1.0, 2.2541729938184312815),
    (1000.0, 0.01, 0.3, 8.2836329878025716512),
    (256.0, 0.2, 10.0, 22.013408142758117984),
    (512.0, 0.9, 7.0, 0.52550057941850487512),
    (2048.0, 0.1, 1e3, 1042368.0113391855577),
    (10.0, 0.3, 0.05, 0.0018638174222555786215),
    (1e6, 0.1, 1.0, 14.381307270490575783),
    ];

/// `(T, ε, γ0)` and `M*`.
pub const M_STAR_GRID: [(f64, f64, f64, f64); 10] = [
    (64.0, 0.1, 4.0 / 3.0, 4004477.9017801000437),
    (128.0, 0.1, 4.0 / 3.0, 2089309411.8220810852),
    (256.0, 0.1, 4.0 / 3.0, 240193574182008.70971),
    (512.0, 0.1, 4.0 / 3.0, 1.2419747198241405757e+24),
    (4096.0, 0.1, 4.0 / 3.0, 1.7169663427187432992e+155),
    (4.0, 0.5, 1.0, 44.182457199102547449),
    (64.0, 0.05, 0.5, 30133.628021388345971),
    (1000.0, 0.2, 2.0, 1.6822558390358854037e+60),
    (32.0, 0.1, 0.1, 4.3036317014558458677),
    (8000.0, 0.1, 1.3, 5.4276664449412393834e+289),
    ];

pub const ETA_4096: f64 = 1.9235933878519512098;
/// Remainder at `T = 4096`, `ε = 0.1`, `E = 1`, zero infimum.
pub const EXACT_BOUND_4096: f64 = 11.38571115151336932;

/// Relative error below `5e-11`, i.e. ten significant digits.
pub fn sig10(got: f64, want: f64) -> bool {
    ((got - want) / want).abs() < 5e-11
}
