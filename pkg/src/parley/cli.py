"""Command line entry points: demo dialog, evaluation, training, serving."""

from __future__ import annotations

import argparse
import json
import sys

from .domains import builtin_domain_names, general_asset, load_domain
from .nlu import NluRuleSet
from .policy.rl.network import QNetwork
from .policy.rl.trainer import DqnConfig, DqnTrainer
from .services import (
    ScriptedUser,
    build_text_pipeline,
    handcrafted_decider,
    network_decider,
)
from .sim.env import DialogEnv
from .sim.evaluate import EvalConfig, metrics_csv, metrics_json, run_evaluation

DEMO_SCRIPT = [
    "I could have something to eat. What does the mensa offer today?",
    "I would like a main dish.",
    "Yes.",
    "Okay, cool, I will go there now! What is the weather like?",
    "Thank you, good bye!",
]


def _load_stack(domain_names):
    domains = [load_domain(name) for name in domain_names]
    general = NluRuleSet.from_file(str(general_asset("nlu_rules.json")))
    return domains, general


def cmd_demo(args) -> int:
    domains, general = _load_stack(args.domains)
    if args.script:
        with open(args.script, encoding="utf-8") as fh:
            script = json.load(fh)
    else:
        script = DEMO_SCRIPT
    ds = build_text_pipeline(domains, general, user_service=ScriptedUser(script))
    result = ds.run_dialog()
    for envelope in result.transcript:
        speaker = "System" if envelope.topic.base == "sys_utterance" else "User"
        print(f"{speaker:>6}: {envelope.payload['text']}")
    print(f"-- {result.reason.value} after {result.cycles} cycles")
    return 0


def _build_decider(cfg: EvalConfig, domain):
    if cfg.policy == "rl":
        if not cfg.model_path:
            raise SystemExit("rl evaluation needs --model (or model_path in the config)")
        return network_decider(domain, QNetwork.load(cfg.model_path))
    return handcrafted_decider(domain)


def cmd_eval(args) -> int:
    if args.config:
        cfg = EvalConfig.from_file(args.config)
    else:
        cfg = EvalConfig(
            domain=args.domain,
            policy=args.policy,
            n_dialogs=args.dialogs,
            max_turns=args.max_turns,
            seed=args.seed,
            model_path=args.model,
            workers=args.workers,
        )
    domain = load_domain(cfg.domain)
    metrics = run_evaluation(
        _build_decider(cfg, domain), domain,
        n_dialogs=cfg.n_dialogs, max_turns=cfg.max_turns, seed=cfg.seed,
        workers=cfg.workers, turn_penalty=cfg.turn_penalty,
        success_reward=cfg.success_reward,
    )
    print(metrics_json(metrics))
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(metrics_json(metrics) + "\n")
    if args.csv_out:
        with open(args.csv_out, "w", encoding="utf-8") as fh:
            fh.write(metrics_csv(metrics))
    return 0


def cmd_train(args) -> int:
    domain = load_domain(args.domain)
    config = DqnConfig.from_file(args.config) if args.config else DqnConfig(seed=args.seed)
    env = DialogEnv(domain, max_turns=args.max_turns)
    trainer = DqnTrainer(env, config)
    history = trainer.train(args.episodes)
    trainer.net.save(args.out)
    tail = history[-50:]
    avg = sum(s.reward for s in tail) / len(tail) if tail else 0.0
    print(f"trained {len(history)} episodes; avg reward over last {len(tail)}: {avg:.2f}")
    print(f"model written to {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .gateway import create_app

    app = create_app(default_domains=args.domains)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_graph(args) -> int:
    domains, general = _load_stack(args.domains)
    ds = build_text_pipeline(domains, general)
    report, dot = ds.draw_graph()
    print(dot)
    if report.orphan_subscriptions:
        print(f"// orphan subscriptions: {report.orphan_subscriptions}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="parley",
        description="Multi-domain dialog framework: demo, evaluate, train, serve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    all_domains = builtin_domain_names()

    p = sub.add_parser("demo", help="run a scripted dialog and print the transcript")
    p.add_argument("--domains", nargs="+", default=all_domains)
    p.add_argument("--script", help="JSON file with a list of user turns")
    p.set_defaults(fn=cmd_demo)

    p = sub.add_parser("eval", help="evaluate a policy against the user simulator")
    p.add_argument("--config", help="JSON evaluation config (overrides other flags)")
    p.add_argument("--domain", default="mensa")
    p.add_argument("--policy", choices=("handcrafted", "rl"), default="handcrafted")
    p.add_argument("--model", help="ADVQ model file for --policy rl")
    p.add_argument("--dialogs", type=int, default=500)
    p.add_argument("--max-turns", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--json-out")
    p.add_argument("--csv-out")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("train", help="train a Q-network policy in simulation")
    p.add_argument("--domain", default="mensa")
    p.add_argument("--episodes", type=int, default=5000)
    p.add_argument("--max-turns", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="JSON training config")
    p.add_argument("--out", default="policy.advq")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("serve", help="start the session gateway")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--domains", nargs="+", default=all_domains)
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("graph", help="print the service graph as DOT")
    p.add_argument("--domains", nargs="+", default=all_domains)
    p.set_defaults(fn=cmd_graph)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
