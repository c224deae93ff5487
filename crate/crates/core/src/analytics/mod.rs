//! Closed-form structural properties per birth class, and the same
//! quantities measured on a generated graph.

mod classes;
mod clustering;
mod correlation;
mod diameter;
mod distribution;

pub use classes::{
    class_size, closed_degree, closed_edge_weight, closed_strength, degree_classes,
    edges_born, DegreeClass, DegreeClassTable,
};
pub use clustering::{
    clustering_all, global_clustering_closed, global_clustering_empirical,
    global_clustering_printed, local_clustering, weighted_local_clustering, VertexClustering,
};
pub use correlation::{
    birth_of_degree, correlation_report, knn_closed, knn_closed_by_degree, knn_empirical,
    knn_printed_degree_form, knnw_closed, knnw_closed_by_degree, knnw_empirical,
    knnw_printed_degree_form, CorrelationFlag, CorrelationReport, CorrelationRow,
};
pub use diameter::{diameter, diameter_closed};
pub use distribution::{
    cumulative_distributions, distribution_exponents, empirical_distributions, log_log_slope,
    DistributionRow, Distributions, Exponents,
};
