//! Per-interval allocation policies. Each call serves up to `capacity` bytes
//! from the queues in place and returns what was served.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

/// A frame waiting for (or partway through) service.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueuedFrame {
    pub frame_index: usize,
    /// Interval in which the frame arrived.
    pub arrival: u64,
    /// Last interval in which completing service counts as on time.
    pub deadline: u64,
    pub size: u64,
    pub remaining: u64,
}

impl QueuedFrame {
    pub fn new(frame_index: usize, arrival: u64, deadline: u64, size: u64) -> Self {
        Self {
            frame_index,
            arrival,
            deadline,
            size,
            remaining: size,
        }
    }
}

pub type FlowQueue = VecDeque<QueuedFrame>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Allocation {
    /// Bytes served per flow (queue index).
    pub bytes: Vec<u64>,
    /// Frames whose last byte was served, with their queue index.
    pub completed: Vec<(usize, QueuedFrame)>,
}

impl Allocation {
    fn new(flows: usize) -> Self {
        Self {
            bytes: vec![0; flows],
            completed: Vec::new(),
        }
    }

    pub fn total(&self) -> u64 {
        self.bytes.iter().sum()
    }

    fn serve(&mut self, queues: &mut [FlowQueue], flow: usize, amount: u64) {
        let head = queues[flow].front_mut().expect("serving an empty queue");
        head.remaining -= amount;
        self.bytes[flow] += amount;
        if head.remaining == 0 {
            let done = queues[flow].pop_front().expect("head exists");
            self.completed.push((flow, done));
        }
    }
}

/// Earliest deadline first over head-of-line frames; ties go to the lower
/// queue index. The last frame served may be partial.
pub fn schedule_edf(queues: &mut [FlowQueue], capacity: u64) -> Allocation {
    let mut alloc = Allocation::new(queues.len());
    let mut left = capacity;
    while left > 0 {
        let Some(flow) = earliest(queues, |_| true) else {
            break;
        };
        let amount = queues[flow][0].remaining.min(left);
        alloc.serve(queues, flow, amount);
        left -= amount;
    }
    alloc
}

fn earliest(queues: &[FlowQueue], eligible: impl Fn(usize) -> bool) -> Option<usize> {
    queues
        .iter()
        .enumerate()
        .filter(|(i, q)| !q.is_empty() && eligible(*i))
        .min_by_key(|(i, q)| (q[0].deadline, *i))
        .map(|(i, _)| i)
}

/// Deficit counters and round position carried between intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrrState {
    pub deficits: Vec<u64>,
    /// Flow currently (or next) being visited.
    pub cursor: usize,
    /// The visit at `cursor` already received its quantum and was cut short by
    /// capacity.
    pub in_visit: bool,
}

impl DrrState {
    pub fn new(flows: usize) -> Self {
        Self {
            deficits: vec![0; flows],
            cursor: 0,
            in_visit: false,
        }
    }
}

enum VisitEnd {
    /// Queue emptied or head exceeds the deficit.
    Finished,
    /// Capacity ran out while the head still fits the deficit.
    Suspended,
}

/// Serves head frames of `flow` while they fit its deficit and capacity lasts.
fn visit(queues: &mut [FlowQueue], flow: usize, deficit: &mut u64, left: &mut u64, alloc: &mut Allocation) -> VisitEnd {
    loop {
        let Some(head) = queues[flow].front() else {
            *deficit = 0;
            return VisitEnd::Finished;
        };
        if head.remaining > *deficit {
            return VisitEnd::Finished;
        }
        if *left == 0 {
            return VisitEnd::Suspended;
        }
        let amount = head.remaining.min(*left);
        alloc.serve(queues, flow, amount);
        *deficit -= amount;
        *left -= amount;
    }
}

/// Deficit round robin. Visiting a backlogged flow credits its quantum, then
/// serves head frames while they fit the deficit. A flow that empties loses
/// its deficit. When capacity runs out mid-visit the round resumes at the same
/// flow next interval without a new credit.
pub fn schedule_drr(queues: &mut [FlowQueue], capacity: u64, quanta: &[u64], state: &mut DrrState) -> Allocation {
    let n = queues.len();
    let mut alloc = Allocation::new(n);
    let mut left = capacity;
    while left > 0 && queues.iter().any(|q| !q.is_empty()) {
        let i = state.cursor;
        if queues[i].is_empty() {
            state.deficits[i] = 0;
            state.in_visit = false;
            state.cursor = (i + 1) % n;
            continue;
        }
        if !state.in_visit {
            state.deficits[i] += quanta[i];
            state.in_visit = true;
        }
        match visit(queues, i, &mut state.deficits[i], &mut left, &mut alloc) {
            VisitEnd::Suspended => break,
            VisitEnd::Finished => {
                state.in_visit = false;
                state.cursor = (i + 1) % n;
            }
        }
    }
    for (d, q) in state.deficits.iter_mut().zip(queues.iter()) {
        if q.is_empty() {
            *d = 0;
        }
    }
    alloc
}

/// State of the deadline-ordered deficit scheduler.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdfDrrState {
    pub deficits: Vec<u64>,
    /// Flows already credited in the current pass.
    pub visited: Vec<bool>,
    /// Visit cut short by capacity in the previous interval.
    pub current: Option<usize>,
}

impl EdfDrrState {
    pub fn new(flows: usize) -> Self {
        Self {
            deficits: vec![0; flows],
            visited: vec![false; flows],
            current: None,
        }
    }
}

/// Deficit round robin whose visiting order within a pass follows the
/// head-of-line deadlines: the next flow visited is the unvisited backlogged
/// flow with the earliest head deadline (ties: lower index). Crediting and the
/// deficit gate are exactly those of [`schedule_drr`]. A pass ends once every
/// backlogged flow has been visited.
pub fn schedule_edf_drr(
    queues: &mut [FlowQueue],
    capacity: u64,
    quanta: &[u64],
    state: &mut EdfDrrState,
) -> Allocation {
    let n = queues.len();
    let mut alloc = Allocation::new(n);
    let mut left = capacity;
    while left > 0 && queues.iter().any(|q| !q.is_empty()) {
        let i = match state.current.take() {
            Some(i) if !queues[i].is_empty() => i,
            _ => {
                let visited = &state.visited;
                match earliest(queues, |i| !visited[i]) {
                    Some(i) => {
                        state.deficits[i] += quanta[i];
                        state.visited[i] = true;
                        i
                    }
                    None => {
                        state.visited.iter_mut().for_each(|v| *v = false);
                        continue;
                    }
                }
            }
        };
        if let VisitEnd::Suspended = visit(queues, i, &mut state.deficits[i], &mut left, &mut alloc) {
            state.current = Some(i);
            break;
        }
    }
    for (d, q) in state.deficits.iter_mut().zip(queues.iter()) {
        if q.is_empty() {
            *d = 0;
        }
    }
    alloc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn queue(frames: &[(u64, u64)]) -> FlowQueue {
        frames
            .iter()
            .enumerate()
            .map(|(i, &(deadline, size))| QueuedFrame::new(i, 0, deadline, size))
            .collect()
    }

    #[test]
    fn edf_serves_earliest_deadline() {
        let mut q = vec![queue(&[(3, 500)]), queue(&[(5, 500)])];
        let a = schedule_edf(&mut q, 500);
        assert_eq!(a.bytes, vec![500, 0]);
        assert_eq!(a.completed.len(), 1);
        assert_eq!(a.completed[0].0, 0);
    }

    #[test]
    fn edf_tie_goes_to_lower_id() {
        let mut q = vec![queue(&[(4, 300)]), queue(&[(4, 300)])];
        let a = schedule_edf(&mut q, 300);
        assert_eq!(a.bytes, vec![300, 0]);
    }

    #[test]
    fn edf_partial_at_capacity_boundary() {
        let mut q = vec![queue(&[(1, 400)]), queue(&[(2, 400)]), queue(&[(3, 400)])];
        let a = schedule_edf(&mut q, 1000);
        assert_eq!(a.bytes, vec![400, 400, 200]);
        assert_eq!(a.completed.len(), 2);
        assert_eq!(q[2][0].remaining, 200);
    }

    #[test]
    fn drr_defers_oversized_head_one_round() {
        // Capacity is the binding constraint only in the second interval.
        let mut q = vec![queue(&[(9, 1500)]), queue(&[(9, 100), (9, 100)])];
        let mut st = DrrState::new(2);
        let quanta = [1000, 1000];
        // First pass: flow 0 deficit 1000 < 1500, skipped; flow 1 serves both frames.
        // Second pass: flow 0 deficit 2000 >= 1500, served.
        let a = schedule_drr(&mut q, 10_000, &quanta, &mut st);
        assert_eq!(a.bytes, vec![1500, 200]);
        assert_eq!(a.completed[0].0, 1);
        assert_eq!(a.completed.last().unwrap().0, 0);
        assert_eq!(st.deficits, vec![0, 0]);
    }

    #[test]
    fn drr_deficit_carries_over_when_head_too_big() {
        let mut q = vec![queue(&[(9, 1500), (9, 10)])];
        let mut st = DrrState::new(1);
        let quanta = [1000];
        // A single visit per interval: capacity 1 cuts the second visit short.
        let a = schedule_drr(&mut q, 1, &quanta, &mut st);
        // Visit 1: deficit 1000, head 1500 does not fit; visit 2: deficit 2000, serves 1 byte.
        assert_eq!(a.bytes, vec![1]);
        assert_eq!(st.deficits[0], 1999);
        assert!(st.in_visit);
    }

    #[test]
    fn drr_all_empty() {
        let mut q = vec![FlowQueue::new(), FlowQueue::new()];
        let mut st = DrrState::new(2);
        let a = schedule_drr(&mut q, 1000, &[10, 10], &mut st);
        assert_eq!(a.total(), 0);
        assert_eq!(st.deficits, vec![0, 0]);
    }

    #[test]
    fn drr_single_backlogged_flow_takes_full_capacity() {
        let frames: Vec<(u64, u64)> = (0..100).map(|_| (1, 777)).collect();
        let mut q = vec![queue(&frames), FlowQueue::new()];
        let mut st = DrrState::new(2);
        for _ in 0..20 {
            let a = schedule_drr(&mut q, 1000, &[300, 300], &mut st);
            assert_eq!(a.bytes, vec![1000, 0]);
        }
    }

    #[test]
    fn drr_resumes_suspended_visit_without_new_credit() {
        let mut q = vec![queue(&[(0, 600), (0, 600)]), queue(&[(0, 600)])];
        let mut st = DrrState::new(2);
        let quanta = [1200, 1200];
        let a = schedule_drr(&mut q, 900, &quanta, &mut st);
        assert_eq!(a.bytes, vec![900, 0]);
        assert_eq!((st.cursor, st.in_visit, st.deficits[0]), (0, true, 300));
        let b = schedule_drr(&mut q, 900, &quanta, &mut st);
        // Finishes flow 0's visit (300 bytes), then flow 1 gets 600.
        assert_eq!(b.bytes, vec![300, 600]);
    }

    #[test]
    fn edf_drr_visits_urgent_flow_first() {
        // Round-robin order would start at flow 0; flow 1's head is more urgent.
        let mut q = vec![queue(&[(8, 500)]), queue(&[(2, 500)])];
        let mut st = EdfDrrState::new(2);
        let a = schedule_edf_drr(&mut q, 500, &[1000, 1000], &mut st);
        assert_eq!(a.bytes, vec![0, 500]);
    }

    #[test]
    fn edf_drr_equal_deadlines_fall_back_to_lowest_id() {
        let mut q = vec![queue(&[(5, 500)]), queue(&[(5, 500)])];
        let mut st = EdfDrrState::new(2);
        let a = schedule_edf_drr(&mut q, 500, &[1000, 1000], &mut st);
        assert_eq!(a.bytes, vec![500, 0]);
    }

    #[test]
    fn edf_drr_skips_urgent_flow_whose_head_exceeds_deficit() {
        let mut q = vec![queue(&[(1, 1500)]), queue(&[(4, 400)]), queue(&[(6, 400)])];
        let mut st = EdfDrrState::new(3);
        let a = schedule_edf_drr(&mut q, 800, &[1000, 1000, 1000], &mut st);
        // Flow 0 is credited 1000 but cannot send; flows 1 then 2 are served.
        assert_eq!(a.bytes, vec![0, 400, 400]);
        assert_eq!(st.deficits[0], 1000);
        assert!(st.visited[0]);
    }
}
