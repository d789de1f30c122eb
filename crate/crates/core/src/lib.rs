//! Commuting involution graphs of PSL(2,q): construction over GF(p^f),
//! per-lemma empirical verification, point-count audits and exact
//! automorphism groups.

pub mod autgrp;
pub mod error;
pub mod field;
pub mod graph;
pub mod perm;
pub mod psl2;
pub mod report;
pub mod verify;
pub mod weil;

pub use error::{Error, Result};
pub use field::{Fe, FieldSpec, QuadraticClass};
pub use graph::{build_graph, DiscDecomposition, InvolutionGraph, SimpleGraph, UNREACHABLE};
pub use perm::Perm;
pub use psl2::{Involution, Mat2, ProjAction, VertexTable};
pub use report::{LemmaId, LemmaReport, ReportBuilder, Status};
pub use verify::{CheckOptions, LemmaContext};
pub use weil::Poly;
pub use autgrp::{PermutationGroup, SearchOptions};
