//! JSON region files.
//!
//! ```json
//! {"type": "complement", "children": [
//!     {"type": "cap", "center": [0, 0, 1], "radius": 0.93, "boundary": "closed"}
//! ]}
//! ```
//!
//! Leaves: `cap` (`center`, `radius`), `lune` (`axis`, `start`, `width`,
//! optional `reference`), `hemisphere` (`normal`), `full`, `empty`.
//! Internal nodes carry `children`: any number for `union` and
//! `intersection`, one for `complement`, two for `difference`.
//! Angles are radians. Vectors are normalized on load. `boundary` defaults to
//! `"closed"`; lunes additionally accept `"half_open"`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Boundary, Hemisphere, Lune, LuneBoundary, Region, SphericalCap, UnitVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum Node {
    Empty,
    Full,
    Cap {
        center: [f64; 3],
        radius: f64,
        #[serde(default = "closed")]
        boundary: Boundary,
    },
    Lune {
        axis: [f64; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reference: Option<[f64; 3]>,
        #[serde(default)]
        start: f64,
        width: f64,
        #[serde(default = "lune_closed")]
        boundary: LuneBoundary,
    },
    Hemisphere {
        normal: [f64; 3],
        #[serde(default = "closed")]
        boundary: Boundary,
    },
    Union {
        children: Vec<Node>,
    },
    Intersection {
        children: Vec<Node>,
    },
    Complement {
        children: Vec<Node>,
    },
    Difference {
        children: Vec<Node>,
    },
}

fn closed() -> Boundary {
    Boundary::Closed
}

fn lune_closed() -> LuneBoundary {
    LuneBoundary::Closed
}

fn unit(v: [f64; 3], what: &str) -> Result<UnitVector> {
    UnitVector::from_unit_array(v).map_err(|e| Error::RegionFile(format!("{what}: {e}")))
}

fn invalid(e: Error) -> Error {
    Error::RegionFile(e.to_string())
}

impl TryFrom<Node> for Region {
    type Error = Error;

    fn try_from(node: Node) -> Result<Region> {
        let convert = |children: Vec<Node>| -> Result<Vec<Region>> {
            children.into_iter().map(Region::try_from).collect()
        };
        Ok(match node {
            Node::Empty => Region::Empty,
            Node::Full => Region::Full,
            Node::Cap {
                center,
                radius,
                boundary,
            } => Region::Cap(SphericalCap::new(unit(center, "cap center")?, radius, boundary).map_err(invalid)?),
            Node::Lune {
                axis,
                reference,
                start,
                width,
                boundary,
            } => {
                let axis = unit(axis, "lune axis")?;
                let lune = match reference {
                    Some(r) => Lune::with_reference(axis, unit(r, "lune reference")?, start, width, boundary),
                    None => Lune::new(axis, start, width, boundary),
                };
                Region::Lune(lune.map_err(invalid)?)
            }
            Node::Hemisphere { normal, boundary } => {
                Region::Hemisphere(Hemisphere::new(unit(normal, "hemisphere normal")?, boundary))
            }
            Node::Union { children } => Region::Union(convert(children)?),
            Node::Intersection { children } => Region::Intersection(convert(children)?),
            Node::Complement { children } => {
                let [child]: [Node; 1] = children
                    .try_into()
                    .map_err(|_| Error::RegionFile("complement needs exactly one child".into()))?;
                Region::try_from(child)?.complement()
            }
            Node::Difference { children } => {
                let [a, b]: [Node; 2] = children
                    .try_into()
                    .map_err(|_| Error::RegionFile("difference needs exactly two children".into()))?;
                Region::try_from(a)?.difference(Region::try_from(b)?)
            }
        })
    }
}

impl From<&Region> for Node {
    fn from(region: &Region) -> Node {
        let kids = |rs: &[Region]| rs.iter().map(Node::from).collect();
        match region {
            Region::Empty => Node::Empty,
            Region::Full => Node::Full,
            Region::Cap(c) => Node::Cap {
                center: c.center().to_array(),
                radius: c.angular_radius(),
                boundary: c.boundary(),
            },
            Region::Lune(l) => Node::Lune {
                axis: l.axis().to_array(),
                reference: Some(l.reference().to_array()),
                start: l.start_longitude(),
                width: l.width(),
                boundary: l.boundary(),
            },
            Region::Hemisphere(h) => Node::Hemisphere {
                normal: h.normal.to_array(),
                boundary: h.boundary,
            },
            Region::Union(rs) => Node::Union { children: kids(rs) },
            Region::Intersection(rs) => Node::Intersection { children: kids(rs) },
            Region::Complement(r) => Node::Complement {
                children: vec![Node::from(r.as_ref())],
            },
            Region::Difference(a, b) => Node::Difference {
                children: vec![Node::from(a.as_ref()), Node::from(b.as_ref())],
            },
        }
    }
}

impl Region {
    pub fn from_json_str(s: &str) -> Result<Region> {
        let node: Node = serde_json::from_str(s).map_err(|e| Error::RegionFile(e.to_string()))?;
        Region::try_from(node)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Region> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::RegionFile(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&Node::from(self)).expect("region nodes always serialize")
    }
}
