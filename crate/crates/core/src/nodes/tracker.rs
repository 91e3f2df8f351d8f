use serde::{Deserialize, Serialize};

use super::finder::{find_nodes, NewtonSolver, NodeSearch};
use crate::basis::{AngularState, CartesianPoint};
use crate::error::{Error, Result};
use crate::vorticity::total_vorticity_theorem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackSample {
    pub t: f64,
    pub position: CartesianPoint<f64>,
}

/// Pair creation or annihilation, with the partner track.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairEvent {
    pub t: f64,
    pub partner: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeTrack {
    pub id: usize,
    pub winding: i32,
    pub samples: Vec<TrackSample>,
    pub birth: Option<PairEvent>,
    pub death: Option<PairEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Birth,
    Death,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeEvent {
    pub kind: EventKind,
    pub t: f64,
    /// Track ids of the `+1` and `-1` partners.
    pub positive: usize,
    pub negative: usize,
    pub position: CartesianPoint<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackOptions {
    /// Frame spacing; frames are the recorded sample times.
    pub dt: f64,
    /// Full seed-grid scans for newly created pairs every this many frames.
    pub scan_every: usize,
    pub search: NodeSearch,
    /// Largest separation of a created or annihilated pair inside the search
    /// core; grows in proportion to the radius beyond it.
    pub pair_radius: f64,
    /// How often a frame step may be halved before giving up.
    pub max_halvings: u32,
}

impl TrackOptions {
    pub fn for_state(state: &AngularState<f64>) -> Self {
        Self {
            dt: std::f64::consts::TAU / 2000.0,
            scan_every: 20,
            search: NodeSearch::for_state(state),
            pair_radius: 0.5,
            max_halvings: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeTracking {
    pub tracks: Vec<NodeTrack>,
    pub events: Vec<NodeEvent>,
    /// Total vorticity from the vorticity theorem.
    pub total_winding: i32,
    /// Largest deviation of the summed winding of live nodes from
    /// `total_winding` over all frames (zero when conservation held).
    pub max_winding_imbalance: i32,
}

impl NodeTracking {
    /// Tracks alive at time `t` (closed birth, open death).
    pub fn live_at(&self, t: f64) -> impl Iterator<Item = &NodeTrack> + '_ {
        self.tracks.iter().filter(move |tr| {
            let first = tr.samples.first().map_or(f64::INFINITY, |s| s.t);
            let end = tr.death.map_or(f64::INFINITY, |d| d.t);
            first <= t && t < end
        })
    }

    pub fn alive_at(&self, t: f64) -> usize {
        self.live_at(t).count()
    }
}

#[derive(Debug, Clone, Copy)]
struct Active {
    id: usize,
    x: f64,
    y: f64,
    winding: i32,
}

struct Tracker<'a> {
    state: &'a AngularState<f64>,
    solver: NewtonSolver,
    opts: &'a TrackOptions,
    tracks: Vec<NodeTrack>,
    events: Vec<NodeEvent>,
    active: Vec<Active>,
    last_scan: f64,
}

impl<'a> Tracker<'a> {
    fn new_track(&mut self, winding: i32, samples: Vec<TrackSample>) -> usize {
        let id = self.tracks.len();
        self.tracks.push(NodeTrack {
            id,
            winding,
            samples,
            birth: None,
            death: None,
        });
        id
    }

    // Continue every node from `from` (positions at t_a) to t_b. Returns the
    // new positions or the indices that failed validation.
    //
    // A step is accepted when it lands within half the gap to the nearest
    // other node and within half the predicted displacement of the
    // velocity-extrapolated position. Smooth motion passes once the step is
    // short enough; identity swaps with untracked nodes never do.
    fn continue_nodes(
        &self,
        from: &[Active],
        t_a: f64,
        t_b: f64,
    ) -> std::result::Result<Vec<(f64, f64)>, Vec<usize>> {
        let mut out = Vec::with_capacity(from.len());
        let mut failed = Vec::new();
        for (k, a) in from.iter().enumerate() {
            let nearest = from
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, b)| (a.x - b.x).hypot(a.y - b.y))
                .fold(f64::INFINITY, f64::min);
            let dt = t_b - t_a;
            let accepted = self.solver.node_velocity(a.x, a.y, t_a).and_then(|(vx, vy)| {
                let (px, py) = (a.x + dt * vx, a.y + dt * vy);
                let slack = 0.5 * dt.abs() * vx.hypot(vy) + 1e-8 * (1.0 + a.x.hypot(a.y));
                match self.solver.solve(px, py, t_b) {
                    Ok(Some((x, y, _)))
                        if (x - a.x).hypot(y - a.y) <= 0.5 * nearest
                            && (x - px).hypot(y - py) <= slack =>
                    {
                        Some((x, y))
                    }
                    _ => None,
                }
            });
            match accepted {
                Some(p) => out.push(p),
                _ => {
                    failed.push(k);
                    out.push((f64::NAN, f64::NAN));
                }
            }
        }
        for i in 0..out.len() {
            for j in i + 1..out.len() {
                let d = (out[i].0 - out[j].0).hypot(out[i].1 - out[j].1);
                if d <= self.opts.search.merge_radius {
                    failed.push(i);
                    failed.push(j);
                }
            }
        }
        if failed.is_empty() {
            Ok(out)
        } else {
            failed.sort_unstable();
            failed.dedup();
            Err(failed)
        }
    }

    // Moves the active set from t_a to t_b, halving on failure and resolving
    // annihilations at the finest level.
    fn advance(&mut self, t_a: f64, t_b: f64, depth: u32, frames: &[f64]) -> Result<()> {
        match self.continue_nodes(&self.active, t_a, t_b) {
            Ok(pos) => {
                self.apply(pos);
                Ok(())
            }
            Err(_) if depth < self.opts.max_halvings => {
                let mid = 0.5 * (t_a + t_b);
                self.advance(t_a, mid, depth + 1, frames)?;
                self.advance(mid, t_b, depth + 1, frames)
            }
            Err(mut failed) => {
                if !self.pairable(&failed) {
                    // a partner nobody was tracking: look again
                    if self.scan(t_a, frames)? == 0 {
                        return Err(Error::TrackingAmbiguity { t: t_a });
                    }
                    failed = match self.continue_nodes(&self.active, t_a, t_b) {
                        Ok(pos) => {
                            self.apply(pos);
                            return Ok(());
                        }
                        Err(f) => f,
                    };
                    failed = self.with_partners(&self.active, failed);
                }
                self.annihilate(&failed, t_a, t_b)?;
                match self.continue_nodes(&self.active, t_a, t_b) {
                    Ok(pos) => {
                        self.apply(pos);
                        Ok(())
                    }
                    Err(_) => Err(Error::TrackingAmbiguity { t: t_a }),
                }
            }
        }
    }

    fn apply(&mut self, pos: Vec<(f64, f64)>) {
        for (a, p) in self.active.iter_mut().zip(pos) {
            a.x = p.0;
            a.y = p.1;
        }
    }

    fn pairable(&self, failed: &[usize]) -> bool {
        let cand: Vec<Active> = failed.iter().map(|&k| self.active[k]).collect();
        pair_opposite(&cand, self.opts.pair_radius, self.opts.search.core_radius).len() * 2 == cand.len()
    }

    // A node about to annihilate (or just created, going backwards) can fail
    // alone while its partner still converges; pull in the nearest opposite
    // node of `set` for each unpaired one.
    fn with_partners(&self, set: &[Active], mut failed: Vec<usize>) -> Vec<usize> {
        let (radius, core) = (self.opts.pair_radius, self.opts.search.core_radius);
        let cand: Vec<Active> = failed.iter().map(|&k| set[k]).collect();
        let mut paired = vec![false; cand.len()];
        for (i, j) in pair_opposite(&cand, radius, core) {
            paired[i] = true;
            paired[j] = true;
        }
        for (c, a) in cand.iter().zip(paired) {
            if a {
                continue;
            }
            let partner = set
                .iter()
                .enumerate()
                .filter(|(k, b)| b.winding == -c.winding && !failed.contains(k))
                .map(|(k, b)| {
                    let mid = (0.5 * (b.x + c.x)).hypot(0.5 * (b.y + c.y));
                    (k, (b.x - c.x).hypot(b.y - c.y), pair_reach(radius, core, mid))
                })
                .filter(|&(_, d, reach)| d <= reach)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((k, _, _)) = partner {
                failed.push(k);
            }
        }
        failed.sort_unstable();
        failed
    }

    fn annihilate(&mut self, failed: &[usize], t_a: f64, t_b: f64) -> Result<()> {
        let cand: Vec<Active> = failed.iter().map(|&k| self.active[k]).collect();
        let pairs = pair_opposite(&cand, self.opts.pair_radius, self.opts.search.core_radius);
        let paired: usize = pairs.len() * 2;
        if paired != cand.len() {
            return Err(Error::TrackingAmbiguity { t: t_a });
        }
        let t = 0.5 * (t_a + t_b);
        for (i, j) in pairs {
            let (p, n) = if cand[i].winding > 0 { (cand[i], cand[j]) } else { (cand[j], cand[i]) };
            let pos = CartesianPoint::new(0.5 * (p.x + n.x), 0.5 * (p.y + n.y));
            self.tracks[p.id].death = Some(PairEvent { t, partner: n.id });
            self.tracks[n.id].death = Some(PairEvent { t, partner: p.id });
            for a in [p, n] {
                let samples = &mut self.tracks[a.id].samples;
                if samples.last().is_none_or(|l| l.t < t_a) {
                    samples.push(TrackSample { t: t_a, position: CartesianPoint::new(a.x, a.y) });
                }
            }
            self.events.push(NodeEvent {
                kind: EventKind::Death,
                t,
                positive: p.id,
                negative: n.id,
                position: pos,
            });
        }
        let dead: Vec<usize> = cand.iter().map(|a| a.id).collect();
        self.active.retain(|a| !dead.contains(&a.id));
        Ok(())
    }

    // Follows newly seen nodes backwards from `t_start` towards the previous
    // scan. Nodes that collide on the way were created there as a pair.
    fn adopt(&mut self, found: Vec<Active>, t_start: f64, frames: &[f64]) -> Result<()> {
        let t_floor = self.last_scan;
        let mut cur = found.clone();
        for a in &mut cur {
            a.id = self.new_track(a.winding, Vec::new());
        }
        let started = cur.clone();
        let h_min = self.opts.dt * 0.5f64.powi(self.opts.max_halvings as i32);
        let mut t = t_start;
        let mut h = self.opts.dt;
        while t > t_floor && !cur.is_empty() {
            let t_next = (t - h).max(frames_floor(frames, t)).max(t_floor);
            match self.continue_nodes(&cur, t, t_next) {
                Ok(pos) => {
                    for (a, p) in cur.iter_mut().zip(pos) {
                        a.x = p.0;
                        a.y = p.1;
                    }
                    t = t_next;
                    if frames.iter().any(|f| (f - t).abs() <= 1e-12 * (1.0 + t.abs())) {
                        for a in &cur {
                            self.tracks[a.id].samples.push(TrackSample {
                                t,
                                position: CartesianPoint::new(a.x, a.y),
                            });
                        }
                    }
                    h = self.opts.dt;
                }
                Err(_) if h > h_min => h *= 0.5,
                Err(failed) => {
                    let failed = self.with_partners(&cur, failed);
                    let cand: Vec<Active> = failed.iter().map(|&k| cur[k]).collect();
                    let pairs = pair_opposite(&cand, self.opts.pair_radius, self.opts.search.core_radius);
                    if pairs.is_empty() {
                        return Err(Error::TrackingAmbiguity { t });
                    }
                    let tb = t - 0.5 * h;
                    for (i, j) in pairs {
                        let (p, n) = if cand[i].winding > 0 { (cand[i], cand[j]) } else { (cand[j], cand[i]) };
                        self.tracks[p.id].birth = Some(PairEvent { t: tb, partner: n.id });
                        self.tracks[n.id].birth = Some(PairEvent { t: tb, partner: p.id });
                        for a in [p, n] {
                            self.tracks[a.id].samples.push(TrackSample {
                                t,
                                position: CartesianPoint::new(a.x, a.y),
                            });
                        }
                        self.events.push(NodeEvent {
                            kind: EventKind::Birth,
                            t: tb,
                            positive: p.id,
                            negative: n.id,
                            position: CartesianPoint::new(0.5 * (p.x + n.x), 0.5 * (p.y + n.y)),
                        });
                        cur.retain(|a| a.id != p.id && a.id != n.id);
                    }
                }
            }
        }
        if !cur.is_empty() {
            log::warn!(
                "{} node(s) seen at T = {t_start} were already present at T = {t_floor}",
                cur.len()
            );
        }
        for a in &started {
            self.tracks[a.id].samples.reverse();
        }
        self.active.extend(started);
        Ok(())
    }

    // Full search at `t`; nodes not matching an active track are adopted.
    // Returns how many were added.
    fn scan(&mut self, t: f64, frames: &[f64]) -> Result<usize> {
        let found = find_nodes(self.state, t, &self.opts.search)?;
        let merge = 10.0 * self.opts.search.merge_radius;
        let unmatched: Vec<Active> = found
            .iter()
            .filter(|n| {
                !self
                    .active
                    .iter()
                    .any(|a| (a.x - n.position.x).hypot(a.y - n.position.y) <= merge)
            })
            .map(|n| Active {
                id: usize::MAX,
                x: n.position.x,
                y: n.position.y,
                winding: n.winding,
            })
            .collect();
        if unmatched.iter().any(|a| a.winding.abs() != 1) {
            return Err(Error::FineTuned(format!("node of multiplicity above one at T = {t}")));
        }
        let added = unmatched.len();
        if added > 0 {
            self.adopt(unmatched, t, frames)?;
        }
        self.last_scan = t;
        Ok(added)
    }
}

fn frames_floor(frames: &[f64], t: f64) -> f64 {
    frames
        .iter()
        .copied()
        .filter(|f| *f < t - 1e-12 * (1.0 + t.abs()))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Pairing distance at distance `mid` from the origin. Node spacings grow
/// with radius outside the bulk.
fn pair_reach(radius: f64, core: f64, mid: f64) -> f64 {
    radius * (mid / core).max(1.0)
}

/// Greedy nearest pairing of opposite windings within the pairing reach.
fn pair_opposite(nodes: &[Active], radius: f64, core: f64) -> Vec<(usize, usize)> {
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if nodes[i].winding == -nodes[j].winding {
                let d = (nodes[i].x - nodes[j].x).hypot(nodes[i].y - nodes[j].y);
                let mid = (0.5 * (nodes[i].x + nodes[j].x)).hypot(0.5 * (nodes[i].y + nodes[j].y));
                if d <= pair_reach(radius, core, mid) {
                    cand.push((d, i, j));
                }
            }
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut used = vec![false; nodes.len()];
    let mut out = Vec::new();
    for (_, i, j) in cand {
        if !used[i] && !used[j] {
            used[i] = true;
            used[j] = true;
            out.push((i, j));
        }
    }
    out
}

/// Follows every node of `state` from `t0` to `t1 > t0`, recording positions
/// at frames spaced by `opts.dt` and detecting pair creation and
/// annihilation.
pub fn track_nodes(
    state: &AngularState<f64>,
    t0: f64,
    t1: f64,
    opts: &TrackOptions,
) -> Result<NodeTracking> {
    if !(t1 > t0) || !(opts.dt > 0.0) || opts.scan_every == 0 || !(opts.pair_radius > 0.0) {
        return Err(Error::InvalidInput(
            "tracking needs t1 > t0, dt > 0, scan_every >= 1 and a positive pair radius".into(),
        ));
    }
    let total_winding = total_vorticity_theorem(state)?.n;
    let n_frames = ((t1 - t0) / opts.dt).ceil().max(1.0) as usize;
    let frames: Vec<f64> = (0..=n_frames)
        .map(|k| t0 + (t1 - t0) * k as f64 / n_frames as f64)
        .collect();

    let mut tr = Tracker {
        state,
        solver: NewtonSolver::new(state, &opts.search),
        opts,
        tracks: Vec::new(),
        events: Vec::new(),
        active: Vec::new(),
        last_scan: t0,
    };
    for n in find_nodes(state, t0, &opts.search)? {
        if n.is_fine_tuned() {
            return Err(Error::FineTuned(format!(
                "node of winding {} at T = {t0}",
                n.winding
            )));
        }
        let id = tr.new_track(n.winding, Vec::new());
        tr.active.push(Active {
            id,
            x: n.position.x,
            y: n.position.y,
            winding: n.winding,
        });
    }

    let mut max_imbalance = 0;
    for k in 0..=n_frames {
        let t = frames[k];
        if k > 0 {
            tr.advance(frames[k - 1], t, 0, &frames)?;
            if k % opts.scan_every == 0 || k == n_frames {
                tr.scan(t, &frames)?;
            }
        }
        for a in &tr.active {
            tr.tracks[a.id].samples.push(TrackSample {
                t,
                position: CartesianPoint::new(a.x, a.y),
            });
        }
        let sum: i32 = tr.active.iter().map(|a| a.winding).sum();
        let imbalance = (sum - total_winding).abs();
        if imbalance > max_imbalance {
            log::warn!("winding sum {sum} differs from total vorticity {total_winding} at T = {t}");
            max_imbalance = imbalance;
        }
    }
    tr.events.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(NodeTracking {
        tracks: tr.tracks,
        events: tr.events,
        total_winding,
        max_winding_imbalance: max_imbalance,
    })
}
