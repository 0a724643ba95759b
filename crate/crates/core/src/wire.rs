//! Versioned binary serialization of built scheme instances, for
//! preprocess-once / route-many workflows. Little-endian, length-prefixed
//! sections; the blob records the graph digest and refuses to route on a
//! different graph.

use std::path::Path;

use crate::error::WireError;
use crate::label::{Label, LabelPivot};
use crate::local::LocalTable;
use crate::scheme::{BuildStats, SchemeInstance, SchemeKind, SchemeParams};
use crate::t1::TreeTableSet;
use crate::table::{IntersectionTable, LabelCache, VertexTable};
use crate::tree::{TreeLabel, TreeNodeTable};
use crate::waypoint::{HopMode, SequenceTable, Waypoint};
use crate::weight::{w_ratio, W};

const MAGIC: &[u8; 4] = b"CRL1";
const VERSION: u16 = 1;

const SEC_META: u8 = 1;
const SEC_LABELS: u8 = 2;
const SEC_TABLES: u8 = 3;

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, x: u8) {
        self.buf.push(x);
    }
    fn u16(&mut self, x: u16) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn u32(&mut self, x: u32) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn u64(&mut self, x: u64) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn i64(&mut self, x: i64) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn ratio(&mut self, w: &W) {
        self.i64(*w.numer());
        self.i64(*w.denom());
    }
    fn opt<T>(&mut self, v: &Option<T>, mut f: impl FnMut(&mut Self, &T)) {
        match v {
            None => self.u8(0),
            Some(x) => {
                self.u8(1);
                f(self, x);
            }
        }
    }
    fn len(&mut self, n: usize) {
        self.u64(n as u64);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if self.pos + n > self.buf.len() {
            return Err(WireError::Corrupt(format!("need {n} bytes at {}", self.pos)));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16, WireError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, WireError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn i64(&mut self) -> Result<i64, WireError> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn ratio(&mut self) -> Result<W, WireError> {
        let num = self.i64()?;
        let den = self.i64()?;
        if den == 0 {
            return Err(WireError::Corrupt("zero denominator".into()));
        }
        Ok(w_ratio(num, den))
    }
    fn opt<T>(
        &mut self,
        mut f: impl FnMut(&mut Self) -> Result<T, WireError>,
    ) -> Result<Option<T>, WireError> {
        match self.u8()? {
            0 => Ok(None),
            1 => Ok(Some(f(self)?)),
            t => Err(WireError::Corrupt(format!("bad option tag {t}"))),
        }
    }
    fn len(&mut self) -> Result<usize, WireError> {
        let n = self.u64()?;
        if n > (self.buf.len() - self.pos) as u64 {
            return Err(WireError::Corrupt(format!("length {n} exceeds remaining bytes")));
        }
        Ok(n as usize)
    }
}

fn put_tree_label(w: &mut Writer, l: &TreeLabel) {
    w.u32(l.root);
    w.u32(l.enter);
    w.len(l.lights.len());
    for &(e, p) in &l.lights {
        w.u32(e);
        w.u16(p);
    }
}

fn get_tree_label(r: &mut Reader) -> Result<TreeLabel, WireError> {
    let root = r.u32()?;
    let enter = r.u32()?;
    let n = r.len()?;
    let mut lights = Vec::with_capacity(n);
    for _ in 0..n {
        lights.push((r.u32()?, r.u16()?));
    }
    Ok(TreeLabel { root, enter, lights })
}

fn put_tree_set(w: &mut Writer, s: &TreeTableSet) {
    w.len(s.entries.len());
    for (root, t) in &s.entries {
        w.u32(*root);
        w.u32(t.enter);
        w.u32(t.exit);
        w.opt(&t.parent_port, |w, p| w.u16(*p));
        w.opt(&t.heavy_port, |w, p| w.u16(*p));
    }
}

fn get_tree_set(r: &mut Reader) -> Result<TreeTableSet, WireError> {
    let n = r.len()?;
    let mut entries = Vec::with_capacity(n);
    for _ in 0..n {
        let root = r.u32()?;
        let enter = r.u32()?;
        let exit = r.u32()?;
        let parent_port = r.opt(|r| r.u16())?;
        let heavy_port = r.opt(|r| r.u16())?;
        entries.push((root, TreeNodeTable { enter, exit, parent_port, heavy_port }));
    }
    Ok(TreeTableSet { entries })
}

fn put_seq_table(w: &mut Writer, s: &SequenceTable) {
    let (entries, arena) = s.raw_parts();
    w.len(entries.len());
    for (dest, start, len, tag, label) in entries {
        w.u32(dest);
        w.u32(start);
        w.u16(len);
        w.u8(tag);
        w.opt(&label, |w, l| put_tree_label(w, l));
    }
    w.len(arena.len());
    for wp in arena {
        w.u32(wp.vertex);
        match wp.mode {
            HopMode::Vicinity => w.u8(0),
            HopMode::Edge(p) => {
                w.u8(1);
                w.u16(p);
            }
        }
    }
}

fn get_seq_table(r: &mut Reader) -> Result<SequenceTable, WireError> {
    let n = r.len()?;
    let mut entries = Vec::with_capacity(n);
    for _ in 0..n {
        let dest = r.u32()?;
        let start = r.u32()?;
        let len = r.u16()?;
        let tag = r.u8()?;
        let label = r.opt(get_tree_label)?;
        entries.push((dest, start, len, tag, label));
    }
    let an = r.len()?;
    let mut arena = Vec::with_capacity(an);
    for _ in 0..an {
        let vertex = r.u32()?;
        let mode = match r.u8()? {
            0 => HopMode::Vicinity,
            1 => HopMode::Edge(r.u16()?),
            t => return Err(WireError::Corrupt(format!("bad hop mode {t}"))),
        };
        arena.push(Waypoint { vertex, mode });
    }
    let entries = entries
        .into_iter()
        .map(|(d, s, l, t, lb)| (d, s, l, t, lb))
        .collect();
    Ok(SequenceTable::from_raw_parts(entries, arena))
}

fn put_label(w: &mut Writer, l: &Label) {
    w.u32(l.vertex);
    w.opt(&l.color, |w, c| w.u16(*c));
    w.len(l.pivots.len());
    for p in &l.pivots {
        w.u32(p.pivot);
        w.opt(&p.alpha, |w, a| w.u16(*a));
        w.opt(&p.dist, |w, d| w.ratio(d));
        w.opt(&p.edge, |w, (z, port)| {
            w.u32(*z);
            w.u16(*port);
        });
        w.opt(&p.tree_label, |w, t| put_tree_label(w, t));
    }
}

fn get_label(r: &mut Reader) -> Result<Label, WireError> {
    let vertex = r.u32()?;
    let color = r.opt(|r| r.u16())?;
    let n = r.len()?;
    let mut pivots = Vec::with_capacity(n);
    for _ in 0..n {
        let pivot = r.u32()?;
        let alpha = r.opt(|r| r.u16())?;
        let dist = r.opt(|r| r.ratio())?;
        let edge = r.opt(|r| Ok((r.u32()?, r.u16()?)))?;
        let tree_label = r.opt(get_tree_label)?;
        pivots.push(LabelPivot { pivot, alpha, dist, edge, tree_label });
    }
    Ok(Label { vertex, color, pivots })
}

fn put_table(w: &mut Writer, t: &VertexTable) {
    w.u32(t.vertex);
    w.opt(&t.local, |w, l| {
        w.u32(l.owner);
        w.u64(l.ell as u64);
        w.len(l.entries().len());
        for &(v, p, rank) in l.entries() {
            w.u32(v);
            w.u16(p);
            w.u32(rank);
        }
    });
    w.len(t.radii.len());
    for radius in &t.radii {
        w.ratio(radius);
    }
    w.len(t.color_reps.len());
    for reps in &t.color_reps {
        w.len(reps.len());
        for (v, d) in reps {
            w.u32(*v);
            w.ratio(d);
        }
    }
    w.len(t.cluster_tables.len());
    for s in &t.cluster_tables {
        put_tree_set(w, s);
    }
    w.len(t.label_caches.len());
    for c in &t.label_caches {
        w.len(c.entries.len());
        for (v, l) in &c.entries {
            w.u32(*v);
            put_tree_label(w, l);
        }
    }
    put_tree_set(w, &t.global_tables);
    w.len(t.intersections.len());
    for i in &t.intersections {
        w.len(i.entries.len());
        for &(d, via) in &i.entries {
            w.u32(d);
            w.u32(via);
        }
    }
    w.opt(&t.t1_seqs, |w, s| put_seq_table(w, s));
    put_tree_set(w, &t.t1_trees);
    w.len(t.t2_seqs.len());
    for s in &t.t2_seqs {
        put_seq_table(w, s);
    }
    w.len(t.bunch.len());
    for &v in &t.bunch {
        w.u32(v);
    }
}

fn get_table(r: &mut Reader) -> Result<VertexTable, WireError> {
    let vertex = r.u32()?;
    let local = r.opt(|r| {
        let owner = r.u32()?;
        let ell = r.u64()? as usize;
        let n = r.len()?;
        let mut entries = Vec::with_capacity(n);
        for _ in 0..n {
            entries.push((r.u32()?, r.u16()?, r.u32()?));
        }
        Ok(LocalTable::from_raw(owner, ell, entries))
    })?;
    let mut radii = Vec::new();
    for _ in 0..r.len()? {
        radii.push(r.ratio()?);
    }
    let mut color_reps = Vec::new();
    for _ in 0..r.len()? {
        let mut reps = Vec::new();
        for _ in 0..r.len()? {
            reps.push((r.u32()?, r.ratio()?));
        }
        color_reps.push(reps);
    }
    let mut cluster_tables = Vec::new();
    for _ in 0..r.len()? {
        cluster_tables.push(get_tree_set(r)?);
    }
    let mut label_caches = Vec::new();
    for _ in 0..r.len()? {
        let mut entries = Vec::new();
        for _ in 0..r.len()? {
            entries.push((r.u32()?, get_tree_label(r)?));
        }
        label_caches.push(LabelCache { entries });
    }
    let global_tables = get_tree_set(r)?;
    let mut intersections = Vec::new();
    for _ in 0..r.len()? {
        let mut entries = Vec::new();
        for _ in 0..r.len()? {
            entries.push((r.u32()?, r.u32()?));
        }
        intersections.push(IntersectionTable { entries });
    }
    let t1_seqs = r.opt(get_seq_table)?;
    let t1_trees = get_tree_set(r)?;
    let mut t2_seqs = Vec::new();
    for _ in 0..r.len()? {
        t2_seqs.push(get_seq_table(r)?);
    }
    let mut bunch = Vec::new();
    for _ in 0..r.len()? {
        bunch.push(r.u32()?);
    }
    Ok(VertexTable {
        vertex,
        local,
        radii,
        color_reps,
        cluster_tables,
        label_caches,
        global_tables,
        intersections,
        t1_seqs,
        t1_trees,
        t2_seqs,
        bunch,
    })
}

fn put_section(out: &mut Vec<u8>, tag: u8, body: Writer) {
    out.push(tag);
    out.extend_from_slice(&(body.buf.len() as u64).to_le_bytes());
    out.extend_from_slice(&body.buf);
}

pub fn encode(inst: &SchemeInstance) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());

    let mut meta = Writer::default();
    meta.u8(inst.kind.tag());
    meta.opt(&inst.params.epsilon, |w, e| w.ratio(e));
    meta.opt(&inst.params.k, |w, k| w.u32(*k));
    meta.opt(&inst.params.ell, |w, l| w.u32(*l));
    meta.ratio(&inst.params.alpha);
    meta.ratio(&inst.params.beta);
    meta.u64(inst.params.seed);
    meta.u64(inst.graph_digest);
    meta.u64(inst.n as u64);
    meta.u64(inst.max_degree as u64);
    meta.u64(inst.q as u64);
    meta.u64(inst.header_bound_bits);
    meta.u64(inst.stats.q as u64);
    meta.len(inst.stats.vicinity_sizes.len());
    for &s in &inst.stats.vicinity_sizes {
        meta.u64(s as u64);
    }
    meta.len(inst.stats.center_sizes.len());
    for &s in &inst.stats.center_sizes {
        meta.u64(s as u64);
    }
    meta.len(inst.stats.coloring_attempts.len());
    for &s in &inst.stats.coloring_attempts {
        meta.u64(s as u64);
    }
    meta.u64(inst.stats.hitting_size as u64);
    meta.u64(inst.stats.sample_attempts as u64);
    put_section(&mut out, SEC_META, meta);

    let mut labels = Writer::default();
    labels.len(inst.labels.len());
    for l in &inst.labels {
        put_label(&mut labels, l);
    }
    put_section(&mut out, SEC_LABELS, labels);

    let mut tables = Writer::default();
    tables.len(inst.tables.len());
    for t in &inst.tables {
        put_table(&mut tables, t);
    }
    put_section(&mut out, SEC_TABLES, tables);
    out
}

pub fn decode(buf: &[u8]) -> Result<SchemeInstance, WireError> {
    if buf.len() < 6 || &buf[..4] != MAGIC || u16::from_le_bytes([buf[4], buf[5]]) != VERSION {
        return Err(WireError::BadHeader);
    }
    let mut pos = 6usize;
    let mut meta: Option<(SchemeKind, SchemeParams, u64, usize, usize, usize, u64, BuildStats)> =
        None;
    let mut labels: Option<Vec<Label>> = None;
    let mut tables: Option<Vec<VertexTable>> = None;
    while pos < buf.len() {
        if pos + 9 > buf.len() {
            return Err(WireError::Corrupt("truncated section header".into()));
        }
        let tag = buf[pos];
        let len = u64::from_le_bytes(buf[pos + 1..pos + 9].try_into().unwrap()) as usize;
        pos += 9;
        if pos + len > buf.len() {
            return Err(WireError::Corrupt("section overruns blob".into()));
        }
        let mut r = Reader { buf: &buf[pos..pos + len], pos: 0 };
        pos += len;
        match tag {
            SEC_META => {
                let kind = SchemeKind::from_tag(r.u8()?)
                    .ok_or_else(|| WireError::Corrupt("bad scheme tag".into()))?;
                let epsilon = r.opt(|r| r.ratio())?;
                let k = r.opt(|r| r.u32())?;
                let ell = r.opt(|r| r.u32())?;
                let alpha = r.ratio()?;
                let beta = r.ratio()?;
                let seed = r.u64()?;
                let digest = r.u64()?;
                let n = r.u64()? as usize;
                let max_degree = r.u64()? as usize;
                let q = r.u64()? as usize;
                let header_bound = r.u64()?;
                let stats_q = r.u64()? as usize;
                let mut vicinity_sizes = Vec::new();
                for _ in 0..r.len()? {
                    vicinity_sizes.push(r.u64()? as usize);
                }
                let mut center_sizes = Vec::new();
                for _ in 0..r.len()? {
                    center_sizes.push(r.u64()? as usize);
                }
                let mut coloring_attempts = Vec::new();
                for _ in 0..r.len()? {
                    coloring_attempts.push(r.u64()? as usize);
                }
                let hitting_size = r.u64()? as usize;
                let sample_attempts = r.u64()? as usize;
                meta = Some((
                    kind,
                    SchemeParams { epsilon, k, ell, alpha, beta, seed },
                    digest,
                    n,
                    max_degree,
                    q,
                    header_bound,
                    BuildStats {
                        q: stats_q,
                        vicinity_sizes,
                        center_sizes,
                        coloring_attempts,
                        hitting_size,
                        sample_attempts,
                    },
                ));
            }
            SEC_LABELS => {
                let n = r.len()?;
                let mut ls = Vec::with_capacity(n);
                for _ in 0..n {
                    ls.push(get_label(&mut r)?);
                }
                labels = Some(ls);
            }
            SEC_TABLES => {
                let n = r.len()?;
                let mut ts = Vec::with_capacity(n);
                for _ in 0..n {
                    ts.push(get_table(&mut r)?);
                }
                tables = Some(ts);
            }
            t => return Err(WireError::Corrupt(format!("unknown section {t}"))),
        }
    }
    let (kind, params, graph_digest, n, max_degree, q, header_bound_bits, stats) =
        meta.ok_or_else(|| WireError::Corrupt("missing meta section".into()))?;
    let labels = labels.ok_or_else(|| WireError::Corrupt("missing labels".into()))?;
    let tables = tables.ok_or_else(|| WireError::Corrupt("missing tables".into()))?;
    if labels.len() != n || tables.len() != n {
        return Err(WireError::Corrupt("table/label count mismatch".into()));
    }
    Ok(SchemeInstance {
        kind,
        params,
        graph_digest,
        n,
        max_degree,
        q,
        tables,
        labels,
        header_bound_bits,
        stats,
    })
}

pub fn save_instance(inst: &SchemeInstance, path: impl AsRef<Path>) -> Result<(), WireError> {
    Ok(std::fs::write(path, encode(inst))?)
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<SchemeInstance, WireError> {
    decode(&std::fs::read(path)?)
}

/// Loads and checks the instance was built for this exact graph.
pub fn load_instance_for(
    path: impl AsRef<Path>,
    g: &crate::graph::Graph,
) -> Result<SchemeInstance, WireError> {
    let inst = load_instance(path)?;
    if inst.graph_digest != g.digest() {
        return Err(WireError::GraphMismatch);
    }
    Ok(inst)
}
