//! Published reference values for `M = 3`: the two lowest levels per
//! signed coupling from a Sturm–Liouville library, naive WKB, and the
//! integral-equation route. Negative `alpha` means `ε = -1`.

use serde::{Deserialize, Serialize};

/// One printed WKB cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WkbCell {
    Value(f64),
    /// Marked `0*`: formal zero-energy solution with a second-order
    /// turning point.
    FormalZero,
    /// Marked `◇`: no usable solution.
    Failed,
}

impl WkbCell {
    pub fn value(self) -> Option<f64> {
        match self {
            WkbCell::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn label(self) -> String {
        match self {
            WkbCell::Value(v) => format!("{v}"),
            WkbCell::FormalZero => "0*".into(),
            WkbCell::Failed => "◇".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    /// Signed coupling `εα`.
    pub alpha: f64,
    pub reference: [f64; 2],
    pub wkb: [WkbCell; 2],
    pub nlie: [f64; 2],
}

use WkbCell::{Failed, FormalZero, Value};

pub const TABLE_M: f64 = 3.0;

/// Rows ordered by signed coupling. Column 0 is the even ground level,
/// column 1 the odd one.
pub const TABLE: [TableRow; 11] = [
    TableRow { alpha: -2.5, reference: [0.22909, 2.3741], wkb: [Failed, Value(2.36641)], nlie: [0.22872, 2.37175] },
    TableRow { alpha: -2.0, reference: [0.44007, 2.7962], wkb: [FormalZero, Value(2.73228)], nlie: [0.43969, 2.79688] },
    TableRow { alpha: -1.5, reference: [0.63726, 3.2028], wkb: [Value(0.17736), Value(3.09594)], nlie: [0.63673, 3.20230] },
    TableRow { alpha: -1.0, reference: [0.81664, 3.5949], wkb: [Value(0.38490), Value(3.45603)], nlie: [0.81478, 3.59506] },
    TableRow { alpha: -0.5, reference: [0.98599, 3.9732], wkb: [Value(0.59582), Value(3.81142)], nlie: [0.98547, 3.97303] },
    TableRow { alpha: 0.0, reference: [1.1448, 4.3385], wkb: [Value(0.8008), Value(4.16123)], nlie: [1.1440, 4.3382] },
    TableRow { alpha: 0.5, reference: [1.2943, 4.6917], wkb: [Value(0.99516), Value(4.50476)], nlie: [1.2931, 4.6918] },
    TableRow { alpha: 1.0, reference: [1.4356, 5.0333], wkb: [Value(1.1768), Value(4.84147)], nlie: [1.43596, 5.0336] },
    TableRow { alpha: 1.5, reference: [1.5696, 5.3642], wkb: [Value(1.3456), Value(5.17101)], nlie: [1.57034, 5.3640] },
    TableRow { alpha: 2.0, reference: [1.6972, 5.6850], wkb: [Value(1.5024), Value(5.49313)], nlie: [1.69667, 5.6842] },
    TableRow { alpha: 2.5, reference: [1.8189, 5.9962], wkb: [Value(1.6487), Value(5.80773)], nlie: [1.81861, 5.9960] },
];

pub fn row(alpha: f64) -> Option<&'static TableRow> {
    TABLE.iter().find(|r| r.alpha == alpha)
}
