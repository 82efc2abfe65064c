use serde::{Deserialize, Serialize};

use crate::copula::Family;
use crate::error::{Error, Result};

/// Smallest grid accepted by the standard layouts.
pub const MIN_GRID_SIZE: usize = 200;

/// Node placement between the truncation bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridLayout {
    Linear,
    Log,
}

impl GridLayout {
    pub fn for_family(family: Family) -> Self {
        match family {
            Family::Clayton | Family::Gumbel => GridLayout::Log,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GridLayout::Linear => "linear",
            GridLayout::Log => "log",
        }
    }

    /// `count >= 2` nodes from `lo` to `hi`, endpoints exact.
    pub fn nodes(self, lo: f64, hi: f64, count: usize) -> Vec<f64> {
        assert!(count >= 2 && lo < hi);
        let last = (count - 1) as f64;
        let mut nodes: Vec<f64> = match self {
            GridLayout::Linear => (0..count).map(|i| lo + (hi - lo) * i as f64 / last).collect(),
            GridLayout::Log => {
                let (a, b) = (lo.ln(), hi.ln());
                (0..count).map(|i| (a + (b - a) * i as f64 / last).exp()).collect()
            }
        };
        nodes[0] = lo;
        nodes[count - 1] = hi;
        nodes
    }
}

/// Strictly increasing parameter nodes spanning the truncation interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaGrid {
    nodes: Vec<f64>,
    layout: Option<GridLayout>,
}

impl ThetaGrid {
    /// Standard grid with `size >= MIN_GRID_SIZE` nodes.
    pub fn new(layout: GridLayout, theta_min: f64, theta_max: f64, size: usize) -> Result<Self> {
        if size < MIN_GRID_SIZE {
            return Err(Error::InvalidArgument(format!(
                "grid size {size} is below the minimum of {MIN_GRID_SIZE}"
            )));
        }
        if !theta_min.is_finite() || !theta_max.is_finite() || theta_min >= theta_max {
            return Err(Error::InvalidArgument(format!(
                "invalid grid bounds [{theta_min}, {theta_max}]"
            )));
        }
        if layout == GridLayout::Log && theta_min <= 0.0 {
            return Err(Error::InvalidArgument("log grid needs a positive lower bound".into()));
        }
        Ok(Self {
            nodes: layout.nodes(theta_min, theta_max, size),
            layout: Some(layout),
        })
    }

    /// Family default layout on `[theta_min, theta_max]`.
    pub fn for_family(family: Family, theta_min: f64, theta_max: f64, size: usize) -> Result<Self> {
        Self::new(GridLayout::for_family(family), theta_min, theta_max, size)
    }

    /// Arbitrary strictly increasing nodes. Any non-empty length is
    /// accepted, including degenerate single-node grids.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("grid needs at least one node".into()));
        }
        if nodes.iter().any(|t| !t.is_finite()) || nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("grid nodes must be finite and strictly increasing".into()));
        }
        Ok(Self { nodes, layout: None })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn layout(&self) -> Option<GridLayout> {
        self.layout
    }

    pub fn min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }
}
