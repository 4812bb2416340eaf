//! Turning command-line names into loaded declarations.
//!
//! `dir/name` loads `dir/name.gat` when it exists and otherwise the whole of
//! `dir`, then looks `name` up. A bare `name` is looked up in the default
//! directory, as is a relative `dir` that does not exist from the working
//! directory. When a file was loaded and `name` is not declared anywhere,
//! the single declaration of the wanted kind in that file is used.

use std::path::{Path, PathBuf};

use gatforge::kernel::Name;
use gatforge::workspace::{LoadError, Workspace};

pub struct Resolved {
    pub ws: Workspace,
    pub name: String,
    /// The file loaded, when the name named one.
    pub file: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Lang,
    Compiler,
}

pub fn default_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(d) = flag {
        return d.to_path_buf();
    }
    if std::env::var_os(gatforge::corpus::CORPUS_ENV).is_none() && Path::new("corpus").is_dir() {
        return PathBuf::from("corpus");
    }
    gatforge::corpus::corpus_dir()
}

fn split(arg: &str, dir: &Path) -> (PathBuf, String) {
    let p = Path::new(arg);
    match (p.parent(), p.file_name()) {
        (Some(parent), Some(file)) if !parent.as_os_str().is_empty() => {
            let stem = Path::new(file).file_stem().unwrap_or(file);
            // `fixtures/broken` means the corpus fixture unless `./fixtures` exists.
            let parent = if parent.is_relative() && !parent.is_dir() && dir.join(parent).is_dir() { dir.join(parent) } else { parent.to_path_buf() };
            (parent, stem.to_string_lossy().into_owned())
        }
        _ => (dir.to_path_buf(), arg.trim_end_matches(".gat").to_string()),
    }
}

pub fn load(arg: &str, dir: &Path) -> Result<Resolved, LoadError> {
    let (dir, name) = split(arg, dir);
    let file = dir.join(format!("{name}.gat"));
    let mut ws = Workspace::new();
    if file.is_file() {
        ws.load_file(&file)?;
        Ok(Resolved { ws, name, file: Some(file) })
    } else {
        ws.load_dir(&dir)?;
        Ok(Resolved { ws, name, file: None })
    }
}

/// Loads `arg` into an existing workspace and returns the resolved name.
pub fn load_into(ws: &mut Workspace, arg: &str, dir: &Path, kind: Kind) -> Result<String, LoadError> {
    let (d, name) = split(arg, dir);
    let file = d.join(format!("{name}.gat"));
    if file.is_file() {
        ws.load_file(&file)?;
    } else {
        ws.load_dir(&d)?;
    }
    let r = Resolved { ws: std::mem::take(ws), name, file: file.is_file().then_some(file) };
    let out = r.item(kind);
    *ws = r.ws;
    out
}

impl Resolved {
    fn same_file(&self, f: &Path) -> bool {
        let canon = |p: &Path| p.canonicalize().unwrap_or_else(|_| p.to_path_buf());
        self.file.as_deref().is_some_and(|mine| canon(mine) == canon(f))
    }

    /// Declarations of `kind` made in the loaded file itself.
    pub fn declared_here(&self, kind: Kind) -> Vec<String> {
        let names: Vec<&Name> = match kind {
            Kind::Lang => self.ws.langs.values().filter(|l| self.same_file(&l.file)).map(|l| &l.name).collect(),
            Kind::Compiler => self.ws.compilers.values().filter(|c| self.same_file(&c.file)).map(|c| &c.name).collect(),
        };
        names.into_iter().map(|n| n.to_string()).collect()
    }

    pub fn item(&self, kind: Kind) -> Result<String, LoadError> {
        let present = match kind {
            Kind::Lang => self.ws.langs.contains_key(&Name::new(&self.name)),
            Kind::Compiler => self.ws.compilers.contains_key(&Name::new(&self.name)),
        };
        if present {
            return Ok(self.name.clone());
        }
        let what = if kind == Kind::Lang { "language" } else { "compiler" };
        match self.declared_here(kind).as_slice() {
            [one] => Ok(one.clone()),
            [] => Err(LoadError::new(format!("no {what} named `{}`", self.name))),
            many => Err(LoadError::new(format!("`{}` declares several {what}s: {}", self.name, many.join(", ")))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_names_use_the_default_directory() {
        let (d, n) = split("nat_vec.gat", Path::new("/tmp/x"));
        assert_eq!((d, n.as_str()), (PathBuf::from("/tmp/x"), "nat_vec"));
    }

    #[test]
    fn relative_parents_fall_back_to_the_corpus() {
        let corpus = gatforge::corpus::corpus_dir();
        let (d, n) = split("fixtures/broken", &corpus);
        assert_eq!((d, n.as_str()), (corpus.join("fixtures"), "broken"));
        let (d, _) = split("/no/such/dir/x", &corpus);
        assert_eq!(d, PathBuf::from("/no/such/dir"));
    }

    #[test]
    fn a_file_with_one_compiler_resolves_to_it() {
        let corpus = gatforge::corpus::corpus_dir();
        let r = load("fixtures/broken", &corpus).unwrap();
        assert_eq!(r.item(Kind::Compiler).unwrap(), "cps_bool_broken");
        assert!(load("no_such_name", &corpus).unwrap().item(Kind::Lang).is_err());
    }
}
