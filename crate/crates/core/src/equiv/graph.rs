use crate::codes::Code;

/// Colored-graph encoding of a code. Vertices 0..n*q are the
/// (coordinate, value) points, flattened as i*q + v and colored 0; the points
/// of each coordinate form a clique. Vertices n*q..n*q+M are the codewords,
/// colored 1; word w is joined to the n points it selects. Two codes are
/// equivalent exactly when their encodings are isomorphic as vertex-colored
/// graphs by an isomorphism respecting the colors.
#[derive(Debug, Clone)]
pub struct ColoredGraph {
    pub n: usize,
    pub q: usize,
    pub n_words: usize,
    pub adj: Vec<Vec<u32>>,
    pub color: Vec<u8>,
}

impl ColoredGraph {
    pub fn n_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }
}

/// Encode a code as a colored graph.
pub fn to_graph(code: &Code) -> ColoredGraph {
    let (n, q, m) = (code.n(), code.q(), code.len());
    let points = n * q;
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); points + m];
    for i in 0..n {
        for v in 0..q {
            for w in v + 1..q {
                let (a, b) = ((i * q + v) as u32, (i * q + w) as u32);
                adj[a as usize].push(b);
                adj[b as usize].push(a);
            }
        }
    }
    for (widx, word) in code.words().enumerate() {
        let wv = (points + widx) as u32;
        for (i, &v) in word.iter().enumerate() {
            let p = (i * q + v as usize) as u32;
            adj[p as usize].push(wv);
            adj[wv as usize].push(p);
        }
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    let mut color = vec![0u8; points + m];
    for c in color.iter_mut().skip(points) {
        *c = 1;
    }
    ColoredGraph { n, q, n_words: m, adj, color }
}
