//! Lattice points of ℤ² (and ℤ, embedded as the x axis).

use serde::{Deserialize, Serialize};
use std::fmt;

/// A point of ℤ². One-dimensional walks use `y = 0`.
///
/// Coordinates are 64-bit: heavy-tailed 1-D walks leave the 32-bit range
/// with non-negligible probability at the horizons we simulate. Arithmetic
/// wraps, so positions live on ℤ/2⁶⁴ in the (practically unreachable)
/// overflow case.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub x: i64,
    pub y: i64,
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0 };

    #[inline]
    pub const fn new(x: i64, y: i64) -> Self {
        Site { x, y }
    }

    #[inline]
    pub fn shifted(self, step: Site) -> Site {
        Site {
            x: self.x.wrapping_add(step.x),
            y: self.y.wrapping_add(step.y),
        }
    }

    #[inline]
    pub fn sub(self, other: Site) -> Site {
        Site {
            x: self.x.wrapping_sub(other.x),
            y: self.y.wrapping_sub(other.y),
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl From<(i64, i64)> for Site {
    fn from((x, y): (i64, i64)) -> Self {
        Site { x, y }
    }
}
