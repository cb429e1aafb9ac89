//! Tabular and graphical output.

mod bars;
mod curves;
mod svg;
mod table;
mod violin;

pub use bars::{negative_elasticity_bars, positive_elasticity_bars, BarChart, BarGroup, Divider};
pub use curves::{
    sample_curves, Annotation, AnnotationKind, Curve, CurveError, CurveSet, Marks, DEMAND_LABEL, MR_LABEL,
};
pub use svg::{emit_svg, Chart, HEIGHT, WIDTH};
pub use table::{render_table, Cell, TableDoc, TableError, TableFormat};
pub use violin::{violin_summary, RegionViolin, ViolinError, ViolinSummary, VIOLIN_GRID};
