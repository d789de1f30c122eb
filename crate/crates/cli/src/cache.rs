//! On-disk cache of built graphs, one checksummed JSON file per field.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use cig_core::{build_graph, FieldSpec, InvolutionGraph, SimpleGraph};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Bumped whenever the file layout changes.
const FORMAT: u32 = 1;
const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize, Deserialize)]
struct Entry {
    format: u32,
    version: String,
    p: u32,
    f: u32,
    modulus: Vec<u32>,
    n: usize,
    edges: Vec<(u32, u32)>,
    checksum: String,
}

fn checksum(format: u32, version: &str, k: &FieldSpec, n: usize, edges: &[(u32, u32)]) -> String {
    let mut h = Sha256::new();
    h.update(format.to_le_bytes());
    h.update((version.len() as u64).to_le_bytes());
    h.update(version.as_bytes());
    h.update(k.p().to_le_bytes());
    h.update(k.f().to_le_bytes());
    h.update(k.modulus_bytes());
    h.update((n as u64).to_le_bytes());
    for (u, v) in edges {
        h.update(u.to_le_bytes());
        h.update(v.to_le_bytes());
    }
    format!("{:x}", h.finalize())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    Miss,
    /// The entry existed but was unreadable, stale or corrupt.
    Rebuilt,
}

#[derive(Clone, Debug)]
pub struct GraphCache {
    dir: PathBuf,
}

impl GraphCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        GraphCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// File for this field; the modulus and code version are part of the key.
    pub fn path_for(&self, k: &FieldSpec) -> PathBuf {
        let digest = Sha256::digest(k.modulus_bytes());
        let tag: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
        self.dir
            .join(format!("graph-{}-{}-{tag}-v{CODE_VERSION}-f{FORMAT}.json", k.p(), k.f()))
    }

    /// Loads the graph for `k`, building and storing it when the entry is missing or bad.
    pub fn load_or_build(&self, k: Arc<FieldSpec>) -> Result<(InvolutionGraph, CacheOutcome)> {
        let path = self.path_for(&k);
        let outcome = match fs::read(&path) {
            Ok(bytes) => match self.decode(&k, &bytes) {
                Ok(g) => return Ok((g, CacheOutcome::Hit)),
                Err(why) => {
                    eprintln!("cache: discarding {}: {why}", path.display());
                    CacheOutcome::Rebuilt
                }
            },
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => CacheOutcome::Miss,
            Err(e) => return Err(CliError::io(&path, e)),
        };
        let g = build_graph(k)?;
        self.store(&g)?;
        Ok((g, outcome))
    }

    fn decode(&self, k: &Arc<FieldSpec>, bytes: &[u8]) -> std::result::Result<InvolutionGraph, String> {
        let e: Entry = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
        if e.format != FORMAT || e.version != CODE_VERSION {
            return Err(format!("written by format {} / version {}", e.format, e.version));
        }
        if e.p != k.p() || e.f != k.f() || e.modulus != k.modulus() {
            return Err("field parameters differ".into());
        }
        if e.checksum != checksum(e.format, &e.version, k, e.n, &e.edges) {
            return Err("checksum mismatch".into());
        }
        let graph = SimpleGraph::from_edges(e.n, e.edges).map_err(|e| e.to_string())?;
        InvolutionGraph::from_parts(Arc::clone(k), graph).map_err(|e| e.to_string())
    }

    pub fn store(&self, g: &InvolutionGraph) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        let k = g.field();
        let edges: Vec<(u32, u32)> = g.graph().edges().collect();
        let entry = Entry {
            format: FORMAT,
            version: CODE_VERSION.to_owned(),
            p: k.p(),
            f: k.f(),
            modulus: k.modulus().to_vec(),
            n: g.n(),
            checksum: checksum(FORMAT, CODE_VERSION, k, g.n(), &edges),
            edges,
        };
        let path = self.path_for(k);
        // write-then-rename so a concurrent reader never sees a partial file
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let bytes = serde_json::to_vec(&entry).expect("cache entry serializes");
        fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))
    }
}

/// Builds through the cache when one is configured.
pub fn obtain_graph(cache: Option<&GraphCache>, q: u32) -> Result<InvolutionGraph> {
    let k = Arc::new(FieldSpec::from_order(q as u64)?);
    match cache {
        Some(c) => Ok(c.load_or_build(k)?.0),
        None => Ok(build_graph(k)?),
    }
}
