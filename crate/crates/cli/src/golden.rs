//! Reference restoration tables for the 12-pixel, 5-bin setups.
//!
//! Values carry three decimals, so comparisons against them use
//! [`TABLE_TOL`].

use serde::{Deserialize, Serialize};

/// Tolerance for agreement with three-decimal reference values.
pub const TABLE_TOL: f64 = 5e-4;

/// One pixel row: index, original, blurred and the three restorations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoldenRow {
    pub i: usize,
    pub original: f64,
    pub blurred: f64,
    pub rl: f64,
    pub lw: f64,
    pub svd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenTable {
    pub name: String,
    pub rows: Vec<GoldenRow>,
}

/// Which restoration column of a [`GoldenTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Original,
    Blurred,
    Rl,
    Lw,
    Svd,
}

impl GoldenTable {
    fn from_rows(name: &str, rows: &[[f64; 5]]) -> Self {
        Self {
            name: name.to_string(),
            rows: rows
                .iter()
                .enumerate()
                .map(|(i, r)| GoldenRow {
                    i,
                    original: r[0],
                    blurred: r[1],
                    rl: r[2],
                    lw: r[3],
                    svd: r[4],
                })
                .collect(),
        }
    }

    pub fn column(&self, c: Column) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| match c {
                Column::Original => r.original,
                Column::Blurred => r.blurred,
                Column::Rl => r.rl,
                Column::Lw => r.lw,
                Column::Svd => r.svd,
            })
            .collect()
    }

    /// Largest per-pixel deviation of `values` from column `c`.
    pub fn max_deviation(&self, c: Column, values: &[f64]) -> f64 {
        assert_eq!(
            values.len(),
            self.rows.len(),
            "length mismatch against {}",
            self.name
        );
        self.column(c)
            .iter()
            .zip(values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// δ at pixel 5, truncated SVD with m = 6.
pub fn delta_table() -> GoldenTable {
    GoldenTable::from_rows(
        "delta",
        &[
            [0.0, 0.000, 0.000, 0.083, -0.061],
            [0.0, 0.000, 0.000, -0.250, -0.167],
            [0.0, 0.000, 0.000, 0.083, 0.083],
            [0.0, 0.125, 0.000, 0.083, 0.000],
            [0.0, 0.250, 0.000, 0.083, 0.228],
            [1.0, 0.250, 1.000, 0.750, 0.583],
            [0.0, 0.250, 0.000, 0.083, 0.228],
            [0.0, 0.125, 0.000, 0.083, 0.000],
            [0.0, 0.000, 0.000, 0.083, 0.083],
            [0.0, 0.000, 0.000, -0.250, -0.167],
            [0.0, 0.000, 0.000, 0.083, -0.061],
            [0.0, 0.000, 0.000, 0.083, 0.250],
        ],
    )
}

/// Ramp over pixels 5..=8, truncated SVD over the full row space.
pub fn ramp_table() -> GoldenTable {
    GoldenTable::from_rows(
        "ramp",
        &[
            [0.0, 0.000, 0.000, 0.000, 0.000],
            [0.0, 0.000, 0.000, 0.000, 0.000],
            [0.0, 0.000, 0.000, 0.000, 0.000],
            [0.0, 0.125, 0.000, 0.000, 0.000],
            [0.0, 0.375, 0.000, 0.000, 0.000],
            [1.0, 0.625, 1.000, 1.000, 1.000],
            [1.0, 0.875, 1.000, 1.000, 1.000],
            [1.0, 0.875, 1.000, 1.000, 1.000],
            [1.0, 0.625, 1.000, 1.000, 1.000],
            [0.0, 0.375, 0.000, 0.000, 0.000],
            [0.0, 0.125, 0.000, 0.000, 0.000],
            [0.0, 0.000, 0.000, 0.000, 0.000],
        ],
    )
}
