pub mod compare;
pub mod evaluate;
pub mod featurize;
pub mod predict;
pub mod prepare;
pub mod train;

use std::fmt::Write as _;
use std::path::Path;

use slid_core::dataset::language_registry;
use slid_core::{Error, Result};

/// The language registry as TSV, one language per line in label order.
pub fn registry_tsv() -> String {
    let mut out = String::from(
        "index\tiso639_3\twilderness_id\tname\tfamily\tgenus\tmacroarea\teval_source\n",
    );
    for (i, l) in language_registry().iter().enumerate() {
        let _ = writeln!(
            out,
            "{i}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            l.iso639_3,
            l.wilderness_id,
            l.name,
            l.family,
            l.genus,
            l.macroarea.name(),
            l.eval_source
        );
    }
    out
}

pub(crate) fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Path of `file` as written into a manifest stored in `manifest_dir`:
/// relative when `file` lies below it, absolute otherwise. Only directories
/// need to exist.
pub(crate) fn manifest_relative(manifest_dir: &Path, file: &Path) -> String {
    let abs = |p: &Path| {
        std::fs::canonicalize(p)
            .unwrap_or_else(|_| std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf()))
    };
    let dir = abs(manifest_dir);
    let file = match (file.parent(), file.file_name()) {
        (Some(parent), Some(name)) => abs(if parent.as_os_str().is_empty() {
            Path::new(".")
        } else {
            parent
        })
        .join(name),
        _ => abs(file),
    };
    match file.strip_prefix(&dir) {
        Ok(rel) => rel.to_string_lossy().into_owned(),
        Err(_) => file.to_string_lossy().into_owned(),
    }
}

/// Directory holding the manifest at `path`.
pub(crate) fn parent_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

/// Keeps `[A-Za-z0-9._-]`, maps everything else to `_`; never starts with a dot.
pub(crate) fn sanitize(name: &str) -> String {
    let mut s: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if s.is_empty() || s.starts_with('.') {
        s.insert(0, '_');
    }
    s
}
