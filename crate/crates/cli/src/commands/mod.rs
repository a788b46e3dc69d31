pub mod estimate;
pub mod nearcritical;
pub mod oracle_verify;
pub mod replay;
pub mod tau;
pub mod wulff;

/// One rendered output file.
pub struct Output {
    pub path: std::path::PathBuf,
    pub content: String,
}

impl Output {
    pub fn write(&self) -> anyhow::Result<()> {
        if let Some(dir) = self.path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        std::fs::write(&self.path, &self.content)?;
        Ok(())
    }
}
