//! Plain-text edge lists: a header line `n m`, then `m` lines `u v [w]`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

pub fn read_edge_list<R: Read>(reader: R) -> Result<Graph> {
    let reader = BufReader::new(reader);
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(format!("reading line {lineno}"), e))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let parse_index = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("expected a nonnegative integer, found {s:?}"),
            })
        };
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "header must be `n m`".into(),
                    });
                }
                header = Some((parse_index(fields[0])?, parse_index(fields[1])?));
            }
            Some(_) => {
                if !(2..=3).contains(&fields.len()) {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "edge line must be `u v` or `u v w`".into(),
                    });
                }
                let u = parse_index(fields[0])?;
                let v = parse_index(fields[1])?;
                let w = match fields.get(2) {
                    Some(s) => s.parse::<f64>().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: format!("invalid weight {s:?}"),
                    })?,
                    None => 1.0,
                };
                edges.push((u, v, w));
            }
        }
    }
    let (n, m) = header.ok_or(Error::Parse {
        line: 0,
        msg: "missing header".into(),
    })?;
    if edges.len() != m {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Graph::new(n, edges)
}

pub fn read_edge_list_file(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    read_edge_list(file)
}

pub fn write_edge_list<W: Write>(g: &Graph, writer: W) -> std::io::Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "{} {}", g.n(), g.num_edges())?;
    for e in g.edges() {
        writeln!(w, "{} {} {}", e.u, e.v, e.w)?;
    }
    w.flush()
}

pub fn write_edge_list_file(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    write_edge_list(g, file).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}
