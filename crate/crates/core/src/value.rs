use core::fmt;

/// A value in the extended real line.
///
/// Superhedging costs can be `-inf` and support functions can be `+inf`.
/// These are kept as explicit variants so they never leak into arithmetic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extended {
    NegInf,
    Finite(f64),
    PosInf,
}

impl Extended {
    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    /// `self <= bound`, with `-inf` below everything and `+inf` above.
    pub fn at_most(self, bound: f64) -> bool {
        match self {
            Extended::NegInf => true,
            Extended::Finite(v) => v <= bound,
            Extended::PosInf => false,
        }
    }

    pub fn at_least(self, bound: f64) -> bool {
        match self {
            Extended::NegInf => false,
            Extended::Finite(v) => v >= bound,
            Extended::PosInf => true,
        }
    }

    /// Map onto `f64` for reporting only.
    pub fn to_f64(self) -> f64 {
        match self {
            Extended::NegInf => f64::NEG_INFINITY,
            Extended::Finite(v) => v,
            Extended::PosInf => f64::INFINITY,
        }
    }

    pub fn neg(self) -> Extended {
        match self {
            Extended::NegInf => Extended::PosInf,
            Extended::Finite(v) => Extended::Finite(-v),
            Extended::PosInf => Extended::NegInf,
        }
    }
}

impl From<f64> for Extended {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            Extended::PosInf
        } else if v == f64::NEG_INFINITY {
            Extended::NegInf
        } else {
            Extended::Finite(v)
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInf => f.write_str("-inf"),
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::PosInf => f.write_str("+inf"),
        }
    }
}
