//! Exact vicinity-only routing: a demo scheme and the substrate every other
//! scheme reuses for its local legs. Deliverable only to destinations inside
//! the source's vicinity.

use crate::bits::id_bits;
use crate::error::{BuildError, RouteError};
use crate::graph::Graph;
use crate::header::{Header, Phase};
use crate::label::Label;
use crate::local::LocalTable;
use crate::scheme::common::build_vicinities;
use crate::scheme::{BuildStats, SchemeInstance, SchemeKind, SchemeParams};
use crate::table::VertexTable;

pub fn preprocess(g: &Graph, params: &SchemeParams) -> Result<SchemeInstance, BuildError> {
    let ell = params.ell.unwrap_or(16) as usize;
    if ell < 1 {
        return Err(BuildError::InvalidParam("ell must be at least 1".into()));
    }
    let vics = build_vicinities(g, ell.min(g.n()));
    let tables = vics
        .iter()
        .map(|vic| {
            let mut t = VertexTable::new(vic.center);
            t.local = Some(LocalTable::from_vicinity(vic));
            t
        })
        .collect();
    let labels = (0..g.n() as u32).map(Label::plain).collect();
    Ok(SchemeInstance {
        kind: SchemeKind::Local,
        params: params.clone(),
        graph_digest: g.digest(),
        n: g.n(),
        max_degree: g.max_degree(),
        q: 1,
        tables,
        labels,
        header_bound_bits: 3 + id_bits(g.n()),
        stats: BuildStats {
            q: 1,
            vicinity_sizes: vec![ell.min(g.n())],
            ..Default::default()
        },
    })
}

pub fn init(source: &VertexTable, label: &Label) -> Result<Header, RouteError> {
    let local = source.local.as_ref().expect("local scheme builds vicinity tables");
    if label.vertex != source.vertex && !local.contains(label.vertex) {
        return Err(RouteError::NotInVicinity { at: source.vertex, dest: label.vertex });
    }
    Ok(Header::new("local", Phase::Local))
}
