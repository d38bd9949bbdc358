use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Real scalar the grid functionals are generic over.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    fn from_f64_lossy(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 converts to any float scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
