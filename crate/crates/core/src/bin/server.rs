use trialalloc::api::{self, ApiConfig};

#[tokio::main]
async fn main() -> std::process::ExitCode {
    let config = match ApiConfig::from_env() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return std::process::ExitCode::from(2);
        }
    };
    eprintln!("listening on {}:{}", config.host, config.port);
    if let Err(e) = api::serve(config).await {
        eprintln!("server error: {e}");
        return std::process::ExitCode::FAILURE;
    }
    std::process::ExitCode::SUCCESS
}
