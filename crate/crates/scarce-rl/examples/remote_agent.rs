//! Start the evaluation service in-process and let an agent play over HTTP.
//!
//! cargo run --example remote_agent

use scarce_rl::agents::{run_qlearning_seq_break, QConfig};
use scarce_rl::client::RemoteEnv;
use scarce_rl::service::{self, ServiceConfig};
use scarce_rl::{Action, BudgetedEnv, Error, SeededRng};

fn main() -> scarce_rl::Result<()> {
    let server = service::spawn(ServiceConfig::default(), "127.0.0.1:0")?;
    println!("service on {}", server.base_url());

    // Any agent runs unchanged: the remote session is just another model.
    let remote = RemoteEnv::create(&server.base_url(), "env_a", Some(0))?;
    let token = remote.token().to_string();
    let mut env = BudgetedEnv::with_default_budget(remote);
    let out = run_qlearning_seq_break(&mut env, &QConfig::default(), &mut SeededRng::new(0))?;
    println!("session {token}: best {:.2} {}", out.best.total, out.best.policy.to_json());

    // The server enforces the budget on its own.
    let session = env.into_inner();
    println!("server says remaining {:?}", session.remaining()?);
    session.reset_session()?;
    match session.step_action(Action::new(0.5, 0.5)?) {
        Err(Error::BudgetExhausted) => println!("101st query refused: budget exhausted"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
