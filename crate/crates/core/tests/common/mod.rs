#![allow(dead_code)]

use zerohalf::Graph;

/// A graph of the corpus with its stability number from the external oracle.
pub struct CorpusGraph {
    pub id: usize,
    pub name: String,
    pub alpha: usize,
    pub graph: Graph,
}

pub fn corpus() -> Vec<CorpusGraph> {
    let text = include_str!("../data/corpus.col");
    text.split("\nc graph ")
        .skip(1)
        .map(|block| {
            let (header, body) = block.split_once('\n').expect("block header");
            let mut words = header.split_whitespace();
            let id = words.next().unwrap().parse().unwrap();
            let alpha = words.next().unwrap().strip_prefix("alpha=").unwrap().parse().unwrap();
            let name = words.next().unwrap_or("").to_string();
            CorpusGraph {
                id,
                name,
                alpha,
                graph: Graph::parse_dimacs(body).expect("corpus graphs parse"),
            }
        })
        .collect()
}
