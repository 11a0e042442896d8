import { mountApp } from "./main";
import "./style.css";

const meta = document.querySelector<HTMLMetaElement>('meta[name="api-base"]');
const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

mountApp(root, { baseUrl: meta?.content ?? "" });
