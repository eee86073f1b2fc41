//! On-disk program registry: one `<name>.json` program document per entry.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use qvn_core::channel::ProgramState;
use qvn_core::memory::ProgramStore;

use crate::error::{QvnError, Result};
use crate::format::{from_json, read_text, to_json, Metadata, ProgramFile};

#[derive(Debug, Clone)]
pub struct Registry {
    root: PathBuf,
}

fn check_name(name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && name.len() <= 128
        && !name.starts_with('.')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(QvnError::InvalidName(name.into()))
    }
}

impl Registry {
    /// Open (creating if needed) the registry directory.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root).map_err(|e| QvnError::io(&root, e))?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path_of(&self, name: &str) -> Result<PathBuf> {
        check_name(name)?;
        Ok(self.root.join(format!("{name}.json")))
    }

    /// Store a program. Fails if the name is already taken.
    pub fn save(&self, name: &str, p: &ProgramState, mut metadata: Metadata) -> Result<PathBuf> {
        let path = self.path_of(name)?;
        metadata.name = Some(name.into());
        let text = to_json(&ProgramFile::from_program(p, metadata)?)?;
        let mut file = match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => return Err(QvnError::NameCollision(name.into())),
            Err(e) => return Err(QvnError::io(&path, e)),
        };
        file.write_all(text.as_bytes()).map_err(|e| QvnError::io(&path, e))?;
        Ok(path)
    }

    pub fn load_file(&self, name: &str) -> Result<ProgramFile> {
        let path = self.path_of(name)?;
        if !path.is_file() {
            return Err(QvnError::NotFound(name.into()));
        }
        from_json(&read_text(&path)?, &path.display().to_string())
    }

    /// Load and validate an entry.
    pub fn load(&self, name: &str) -> Result<ProgramState> {
        let path = self.path_of(name)?;
        self.load_file(name)?.to_program(&path.display().to_string())
    }

    /// Entry names in lexicographic order.
    pub fn list(&self) -> Result<Vec<String>> {
        let dir = std::fs::read_dir(&self.root).map_err(|e| QvnError::io(&self.root, e))?;
        let mut names = Vec::new();
        for entry in dir {
            let entry = entry.map_err(|e| QvnError::io(&self.root, e))?;
            let path = entry.path();
            if path.extension().is_some_and(|x| x == "json") && path.is_file() {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    if check_name(stem).is_ok() {
                        names.push(stem.to_string());
                    }
                }
            }
        }
        names.sort();
        Ok(names)
    }
}

impl ProgramStore for Registry {
    fn fetch(&self, name: &str) -> qvn_core::Result<ProgramState> {
        self.load(name).map_err(|e| match e {
            QvnError::NotFound(n) => qvn_core::Error::MissingProgram(n),
            QvnError::Validation { source, .. } => source,
            other => qvn_core::Error::InvalidState(other.to_string()),
        })
    }
}
