//! Mutually polar retraction pairs `(Q, R)`: `Q + R = I`, `QR = RQ = 0`.

mod gauge;
mod one_range;
mod planar;
mod transversal;

pub use gauge::{gauge_eval, PolytopeInHyperplane};
pub use one_range::{build_one_range, OneRangeRetraction, QRangeCone};
pub use planar::{build_2d, RetractionPair2D};
pub use transversal::{build_transversal, TransversalRetractionPair};

use crate::error::Result;
use crate::geometry::Vector;

/// An evaluable pair `(Q, R)` of mutually polar retractions on `R^d`.
pub trait RetractionPair: Send + Sync {
    fn dim(&self) -> usize;

    /// `(Qx, Rx)`.
    fn eval(&self, x: &Vector) -> Result<(Vector, Vector)>;

    fn q(&self, x: &Vector) -> Result<Vector> {
        Ok(self.eval(x)?.0)
    }

    fn r(&self, x: &Vector) -> Result<Vector> {
        Ok(self.eval(x)?.1)
    }

    /// Short tag naming the construction, used in reports.
    fn construction(&self) -> &'static str;
}
