//! Grouped counts and fractions, yearly series, median smoothing and
//! bootstrap bands.

mod chart;
mod groups;
mod series;

pub use chart::render_svg;
pub use groups::{
    count_table, fraction_table, song_facts, type_gender_pairs, write_count_table,
    write_fraction_table, Count, CountRow, CountTable, FractionRow, FractionTable, GroupKey,
    SongFacts, Subset,
};
pub use series::{
    bootstrap_ci, grouped_series, median_filter, write_series_csv, year_points, yearly_indicators,
    BootstrapConfig, GroupedSeries, SeriesKind, SmoothedPoint, YearPoint,
};
