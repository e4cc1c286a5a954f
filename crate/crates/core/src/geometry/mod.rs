//! Metrics, connections, slice quadrature and the ARW presentation.

pub mod arw;
pub mod connection;
pub mod field;
pub mod metric;
pub mod quadrature;

pub use arw::{arw_validate, ARWSpec, ValidationReport};
pub use connection::{christoffel_at, ConnectionJets};
pub use field::{ExprField, ExprProfile, TimeProfile};
pub use metric::{metric_at, ExprMetric, MetricField, MetricSample, SpacetimeMetric};
pub use quadrature::{integrate_slice, sphere_volume, QuadratureGrid};
