use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Min-heap entry keyed on a float distance; ties broken by vertex index so
/// pops are deterministic.
#[derive(Clone, Copy, Debug)]
pub(crate) struct HeapItem {
    pub key: f64,
    pub vertex: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

pub(crate) type Adjacency = Vec<Vec<(usize, f64)>>;

/// Multi-source Dijkstra. Each source starts at its given offset.
pub(crate) fn dijkstra(adj: &[Vec<(usize, f64)>], sources: &[(usize, f64)]) -> Vec<f64> {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for &(s, offset) in sources {
        if offset < dist[s] {
            dist[s] = offset;
            heap.push(HeapItem {
                key: offset,
                vertex: s,
            });
        }
    }
    while let Some(HeapItem { key, vertex }) = heap.pop() {
        if key > dist[vertex] {
            continue;
        }
        for &(w, len) in &adj[vertex] {
            let cand = key + len;
            if cand < dist[w] {
                dist[w] = cand;
                heap.push(HeapItem {
                    key: cand,
                    vertex: w,
                });
            }
        }
    }
    dist
}

/// Dijkstra that also records predecessors, for path reconstruction.
pub(crate) fn dijkstra_with_parents(
    adj: &[Vec<(usize, f64)>],
    source: usize,
) -> (Vec<f64>, Vec<Option<usize>>) {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapItem {
        key: 0.0,
        vertex: source,
    });
    while let Some(HeapItem { key, vertex }) = heap.pop() {
        if key > dist[vertex] {
            continue;
        }
        for &(w, len) in &adj[vertex] {
            let cand = key + len;
            if cand < dist[w] {
                dist[w] = cand;
                parent[w] = Some(vertex);
                heap.push(HeapItem {
                    key: cand,
                    vertex: w,
                });
            }
        }
    }
    (dist, parent)
}

pub(crate) fn walk_back(parent: &[Option<usize>], target: usize) -> Vec<usize> {
    let mut path = vec![target];
    let mut cur = target;
    while let Some(p) = parent[cur] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    path
}
